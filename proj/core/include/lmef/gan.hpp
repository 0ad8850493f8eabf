#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lmef/population.hpp"
#include "lmef/rng.hpp"

namespace lmef {

enum class Activation { Identity, Tanh, Sigmoid };

struct DenseLayer {
    Eigen::MatrixXd weights;  // out x in
    Eigen::VectorXd bias;
    Activation activation = Activation::Identity;
};

/// Gradient with the same shapes as an Mlp's layers.
struct MlpGradient {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> bias;

    std::size_t size() const;
    /// Flat view in Mlp::parameter() order.
    double flat(std::size_t index) const;
};

/// Fully connected network operating on column batches (one sample per column).
class Mlp {
public:
    Mlp() = default;
    /// `sizes` lists widths from input to output (at least two entries).
    Mlp(const std::vector<std::size_t>& sizes, Activation hidden, Activation output);

    /// Uniform [-a, a] weights with a = sqrt(6 / (fan_in + fan_out)), zero bias.
    void init_glorot(Rng& rng);

    std::vector<std::size_t> sizes() const;
    std::size_t input_size() const { return static_cast<std::size_t>(layers_.front().weights.cols()); }
    std::size_t output_size() const { return static_cast<std::size_t>(layers_.back().weights.rows()); }

    Eigen::MatrixXd forward(const Eigen::MatrixXd& input) const;

    /// Post-activation outputs of every layer; entry 0 is the input.
    std::vector<Eigen::MatrixXd> forward_trace(const Eigen::MatrixXd& input) const;

    /// Backpropagates dLoss/dOutput through a recorded trace. Fills `grad`
    /// when non-null and returns dLoss/dInput.
    Eigen::MatrixXd backward(const std::vector<Eigen::MatrixXd>& trace, const Eigen::MatrixXd& output_grad,
                             MlpGradient* grad) const;

    std::size_t parameter_count() const;
    /// Flat parameter access: per layer, row-major weights then bias.
    double& parameter(std::size_t index);
    double parameter(std::size_t index) const;

    bool finite() const;

    std::vector<DenseLayer>& layers() { return layers_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }

private:
    std::vector<DenseLayer> layers_;
};

/// Per-gene affine map between a box and [-1, 1].
struct Normalizer {
    Bounds bounds;

    Vector to_unit(std::span<const double> x) const;
    Vector from_unit(std::span<const double> y) const;
};

enum class GeneratorLoss { NonSaturating, Minimax };
enum class GanOptimizer { Sgd, Adam };

/// Generator maps [-1,1]^latent_dim to normalized decision space through tanh
/// layers; the discriminator ends in a single logit turned into a probability
/// by a sigmoid.
struct GanModel {
    Mlp generator;
    Mlp discriminator;
    Normalizer normalizer;

    std::size_t latent_dim() const { return generator.input_size(); }
    std::size_t n() const { return normalizer.bounds.size(); }
};

struct GanShape {
    /// Hidden layers per network; each has ceil(1.5 n) units.
    std::size_t hidden_layers = 1;
};

/// Freshly initialized GAN for an n-dimensional box: generator n-1 -> ceil(1.5n) -> n,
/// discriminator n -> ceil(1.5n) -> 1.
GanModel make_gan(const Bounds& bounds, Rng& rng, const GanShape& shape = {});

struct GanTrainConfig {
    double learning_rate = 0.001;
    std::size_t epochs = 200;
    bool full_batch = true;
    std::size_t batch_size = 32;  // used when full_batch is false
    GeneratorLoss generator_loss = GeneratorLoss::NonSaturating;
    GanOptimizer optimizer = GanOptimizer::Sgd;
    bool update_generator = true;

    void validate() const;
};

struct TrainLog {
    std::vector<double> discriminator_loss;  // before each discriminator step
    std::vector<double> generator_loss;      // before each generator step
};

/// `count` latent codes, each coordinate uniform on [-1, 1].
std::vector<Vector> sample_latent(std::size_t count, std::size_t latent_dim, Rng& rng);

/// Decision vector generated from z (denormalized and clamped to bounds).
Vector generate(const GanModel& model, std::span<const double> z);
std::vector<Vector> generate_all(const GanModel& model, std::span<const Vector> zs);

/// Probability that x (decision space) is real.
double discriminate(const GanModel& model, std::span<const double> x);

/// Adversarial training on `real` decision vectors. Each epoch takes one
/// discriminator step on the real batch plus an equal-size fake batch, then one
/// generator step. Throws Error on a non-finite loss.
GanModel train(GanModel model, std::span<const Vector> real, const GanTrainConfig& config, Rng& rng,
               TrainLog* log = nullptr);

// Loss surfaces used by training; exposed for gradient checking.
// `real` holds normalized samples as columns, `latents` latent codes as columns.

/// -mean log D(real) - mean log(1 - D(G(z))).
double discriminator_loss(const GanModel& model, const Eigen::MatrixXd& real, const Eigen::MatrixXd& latents);
MlpGradient discriminator_gradient(const GanModel& model, const Eigen::MatrixXd& real,
                                   const Eigen::MatrixXd& latents);

/// Non-saturating: -mean log D(G(z)). Minimax: mean log(1 - D(G(z))).
double generator_loss(const GanModel& model, const Eigen::MatrixXd& latents, GeneratorLoss kind);
MlpGradient generator_gradient(const GanModel& model, const Eigen::MatrixXd& latents, GeneratorLoss kind);

Eigen::MatrixXd to_columns(std::span<const Vector> xs);

/// Text dump: a header line, the normalizer bounds, then for each network its
/// layer sizes followed by row-major weights and biases.
void save_model(const GanModel& model, std::ostream& out);
GanModel load_model(std::istream& in);

} // namespace lmef
