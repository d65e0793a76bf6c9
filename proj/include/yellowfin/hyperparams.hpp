#pragma once

namespace yellowfin {

/// Learning rate and momentum of the momentum-SGD update
///   x_{t+1} = x_t - lr * g_t + momentum * (x_t - x_{t-1}).
struct Hyperparams {
  double learning_rate = 1e-4;
  double momentum = 0.0;

  /// Throws DomainError unless learning_rate > 0 and 0 <= momentum < 1.
  void validate() const;
};

/// Algorithm-5 initial values: the tuner has not produced a measurement yet.
inline constexpr Hyperparams kInitialHyperparams{1e-4, 0.0};

}  // namespace yellowfin
