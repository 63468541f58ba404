#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aos/common.hpp"

namespace aos {

struct MlpShape {
  int in = 0;
  int hidden = 0;
  int out = 0;
};

// Parameter block of a one-hidden-layer network; also reused for gradients
// and optimizer moments since they share the layout.
struct Tensors {
  std::vector<double> w1, b1, w2, b2;  // w1: hidden x in, w2: out x hidden

  static Tensors zeros(const MlpShape& s);
  void zero();
  std::size_t count() const;
};

struct Mlp {
  MlpShape shape;
  Tensors p;

  // Glorot-uniform weights, zero biases.
  static Mlp init(const MlpShape& s, std::uint64_t seed);
};

struct ForwardCache {
  std::vector<double> x, pre1, h;
};

void forward(const Mlp& net, std::span<const double> x, std::vector<double>& out,
             ForwardCache* cache = nullptr);

// Max-shifted softmax; adding a common constant to the logits is a no-op.
void softmax(std::span<const double> logits, std::vector<double>& probs);

void actor_probs(const Mlp& net, std::span<const double> x,
                 std::vector<double>& probs, ForwardCache* cache = nullptr);

// Probabilities are floored before the log so downstream products stay finite.
double safe_log(double p);

// Accumulates dL/dparams into `grads` given dL/doutput. `cache` must come from
// the forward pass on the same input. ReLU takes subgradient 0 at 0.
void backprop(const Mlp& net, const ForwardCache& cache,
              std::span<const double> upstream, Tensors& grads);

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig cfg;
  long step = 0;
  Tensors m, v;

  explicit AdamState(const MlpShape& s, AdamConfig c = {})
      : cfg(c), m(Tensors::zeros(s)), v(Tensors::zeros(s)) {}
};

// Bias-corrected update; `maximize` flips the step direction for ascent.
void adam_step(Tensors& params, const Tensors& grads, AdamState& st, bool maximize);

// Binary container: magic, JSON header (shape, kind, seed, step), raw little
// endian float64 parameters, trailing checksum. Round trips bit exactly.
void save_checkpoint(const Mlp& net, const std::string& kind, std::uint64_t seed,
                     long step, const std::string& path);

struct Checkpoint {
  Mlp net;
  std::string kind;
  std::uint64_t seed = 0;
  long step = 0;
};

Checkpoint load_checkpoint(const std::string& path);

}  // namespace aos
