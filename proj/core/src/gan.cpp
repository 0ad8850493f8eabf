#include "lmef/gan.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "lmef/error.hpp"

namespace lmef {

namespace {

Eigen::MatrixXd activate(Activation act, Eigen::MatrixXd pre) {
    switch (act) {
    case Activation::Identity: return pre;
    case Activation::Tanh: return pre.array().tanh().matrix();
    case Activation::Sigmoid: return (1.0 / (1.0 + (-pre.array()).exp())).matrix();
    }
    return pre;
}

// Derivative expressed through the post-activation value.
Eigen::MatrixXd activation_slope(Activation act, const Eigen::MatrixXd& post) {
    switch (act) {
    case Activation::Identity: return Eigen::MatrixXd::Ones(post.rows(), post.cols());
    case Activation::Tanh: return (1.0 - post.array().square()).matrix();
    case Activation::Sigmoid: return (post.array() * (1.0 - post.array())).matrix();
    }
    return post;
}

double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

const char* activation_name(Activation act) {
    switch (act) {
    case Activation::Identity: return "identity";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
    }
    return "identity";
}

Activation parse_activation(const std::string& name) {
    if (name == "identity") return Activation::Identity;
    if (name == "tanh") return Activation::Tanh;
    if (name == "sigmoid") return Activation::Sigmoid;
    throw Error("load_model: unknown activation '" + name + "'");
}

} // namespace

std::size_t MlpGradient::size() const {
    std::size_t s = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) s += static_cast<std::size_t>(weights[l].size() + bias[l].size());
    return s;
}

double MlpGradient::flat(std::size_t index) const {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        const auto w = static_cast<std::size_t>(weights[l].size());
        if (index < w) {
            const auto cols = static_cast<std::size_t>(weights[l].cols());
            return weights[l](static_cast<Eigen::Index>(index / cols), static_cast<Eigen::Index>(index % cols));
        }
        index -= w;
        const auto b = static_cast<std::size_t>(bias[l].size());
        if (index < b) return bias[l](static_cast<Eigen::Index>(index));
        index -= b;
    }
    throw PreconditionError("MlpGradient::flat: index out of range");
}

Mlp::Mlp(const std::vector<std::size_t>& sizes, Activation hidden, Activation output) {
    require(sizes.size() >= 2, "Mlp: need input and output sizes");
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        require(sizes[l] > 0 && sizes[l + 1] > 0, "Mlp: layer widths must be positive");
        DenseLayer layer;
        layer.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sizes[l + 1]), static_cast<Eigen::Index>(sizes[l]));
        layer.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sizes[l + 1]));
        layer.activation = (l + 2 == sizes.size()) ? output : hidden;
        layers_.push_back(std::move(layer));
    }
}

void Mlp::init_glorot(Rng& rng) {
    for (auto& layer : layers_) {
        const double a = std::sqrt(6.0 / static_cast<double>(layer.weights.rows() + layer.weights.cols()));
        // Row-major fill order keeps the draw sequence tied to parameter().
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = rng.uniform(-a, a);
        }
        layer.bias.setZero();
    }
}

std::vector<std::size_t> Mlp::sizes() const {
    std::vector<std::size_t> s;
    if (layers_.empty()) return s;
    s.push_back(input_size());
    for (const auto& layer : layers_) s.push_back(static_cast<std::size_t>(layer.weights.rows()));
    return s;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input) const {
    Eigen::MatrixXd a = input;
    for (const auto& layer : layers_) {
        Eigen::MatrixXd pre = layer.weights * a;
        pre.colwise() += layer.bias;
        a = activate(layer.activation, std::move(pre));
    }
    return a;
}

std::vector<Eigen::MatrixXd> Mlp::forward_trace(const Eigen::MatrixXd& input) const {
    std::vector<Eigen::MatrixXd> trace;
    trace.reserve(layers_.size() + 1);
    trace.push_back(input);
    for (const auto& layer : layers_) {
        Eigen::MatrixXd pre = layer.weights * trace.back();
        pre.colwise() += layer.bias;
        trace.push_back(activate(layer.activation, std::move(pre)));
    }
    return trace;
}

Eigen::MatrixXd Mlp::backward(const std::vector<Eigen::MatrixXd>& trace, const Eigen::MatrixXd& output_grad,
                              MlpGradient* grad) const {
    const std::size_t depth = layers_.size();
    if (grad != nullptr) {
        grad->weights.resize(depth);
        grad->bias.resize(depth);
    }
    Eigen::MatrixXd delta = output_grad.cwiseProduct(activation_slope(layers_.back().activation, trace.back()));
    for (std::size_t l = depth; l-- > 0;) {
        if (grad != nullptr) {
            grad->weights[l] = delta * trace[l].transpose();
            grad->bias[l] = delta.rowwise().sum();
        }
        Eigen::MatrixXd upstream = layers_[l].weights.transpose() * delta;
        if (l == 0) return upstream;
        delta = upstream.cwiseProduct(activation_slope(layers_[l - 1].activation, trace[l]));
    }
    return delta;
}

std::size_t Mlp::parameter_count() const {
    std::size_t s = 0;
    for (const auto& layer : layers_) s += static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
    return s;
}

double& Mlp::parameter(std::size_t index) {
    for (auto& layer : layers_) {
        const auto w = static_cast<std::size_t>(layer.weights.size());
        if (index < w) {
            const auto cols = static_cast<std::size_t>(layer.weights.cols());
            return layer.weights(static_cast<Eigen::Index>(index / cols), static_cast<Eigen::Index>(index % cols));
        }
        index -= w;
        const auto b = static_cast<std::size_t>(layer.bias.size());
        if (index < b) return layer.bias(static_cast<Eigen::Index>(index));
        index -= b;
    }
    throw PreconditionError("Mlp::parameter: index out of range");
}

double Mlp::parameter(std::size_t index) const {
    return const_cast<Mlp*>(this)->parameter(index);
}

bool Mlp::finite() const {
    for (const auto& layer : layers_) {
        if (!layer.weights.allFinite() || !layer.bias.allFinite()) return false;
    }
    return true;
}

Vector Normalizer::to_unit(std::span<const double> x) const {
    Vector y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lo = bounds.lower[i];
        const double hi = bounds.upper[i];
        y[i] = 2.0 * (x[i] - lo) / (hi - lo) - 1.0;
    }
    return y;
}

Vector Normalizer::from_unit(std::span<const double> y) const {
    Vector x(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double lo = bounds.lower[i];
        const double hi = bounds.upper[i];
        x[i] = lo + 0.5 * (y[i] + 1.0) * (hi - lo);
    }
    return x;
}

GanModel make_gan(const Bounds& bounds, Rng& rng, const GanShape& shape) {
    const std::size_t n = bounds.size();
    require(n >= 2, "make_gan: decision space needs at least two dimensions");
    require(shape.hidden_layers >= 1, "make_gan: need at least one hidden layer");
    const auto hidden = static_cast<std::size_t>(std::ceil(1.5 * static_cast<double>(n)));

    std::vector<std::size_t> gen_sizes{n - 1};
    std::vector<std::size_t> disc_sizes{n};
    for (std::size_t h = 0; h < shape.hidden_layers; ++h) {
        gen_sizes.push_back(hidden);
        disc_sizes.push_back(hidden);
    }
    gen_sizes.push_back(n);
    disc_sizes.push_back(1);

    GanModel model;
    model.normalizer.bounds = bounds;
    model.generator = Mlp(gen_sizes, Activation::Tanh, Activation::Tanh);
    model.discriminator = Mlp(disc_sizes, Activation::Tanh, Activation::Identity);
    model.generator.init_glorot(rng);
    model.discriminator.init_glorot(rng);
    return model;
}

void GanTrainConfig::validate() const {
    require(std::isfinite(learning_rate) && learning_rate > 0.0, "GAN learning rate must be positive");
    require(epochs >= 1, "GAN epochs must be >= 1");
    require(full_batch || batch_size >= 1, "GAN batch size must be >= 1");
}

std::vector<Vector> sample_latent(std::size_t count, std::size_t latent_dim, Rng& rng) {
    std::vector<Vector> out(count, Vector(latent_dim));
    for (auto& z : out) {
        for (double& v : z) v = rng.uniform(-1.0, 1.0);
    }
    return out;
}

Eigen::MatrixXd to_columns(std::span<const Vector> xs) {
    if (xs.empty()) return {};
    Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.front().size()), static_cast<Eigen::Index>(xs.size()));
    for (std::size_t c = 0; c < xs.size(); ++c) {
        for (std::size_t r = 0; r < xs[c].size(); ++r) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = xs[c][r];
    }
    return m;
}

Vector generate(const GanModel& model, std::span<const double> z) {
    require(z.size() == model.latent_dim(), "generate: latent size mismatch");
    const Eigen::VectorXd zin = Eigen::Map<const Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size()));
    const Eigen::MatrixXd out = model.generator.forward(zin);
    Vector x = model.normalizer.from_unit(std::span<const double>(out.data(), static_cast<std::size_t>(out.size())));
    model.normalizer.bounds.clamp(x);
    return x;
}

std::vector<Vector> generate_all(const GanModel& model, std::span<const Vector> zs) {
    if (zs.empty()) return {};
    for (const auto& z : zs) require(z.size() == model.latent_dim(), "generate: latent size mismatch");
    const Eigen::MatrixXd out = model.generator.forward(to_columns(zs));
    std::vector<Vector> xs;
    xs.reserve(zs.size());
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
        Vector x = model.normalizer.from_unit(std::span<const double>(out.col(c).data(), static_cast<std::size_t>(out.rows())));
        model.normalizer.bounds.clamp(x);
        xs.push_back(std::move(x));
    }
    return xs;
}

double discriminate(const GanModel& model, std::span<const double> x) {
    require(x.size() == model.n(), "discriminate: input size mismatch");
    const Vector u = model.normalizer.to_unit(x);
    const Eigen::VectorXd in = Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
    return sigmoid(model.discriminator.forward(in)(0, 0));
}

double discriminator_loss(const GanModel& model, const Eigen::MatrixXd& real, const Eigen::MatrixXd& latents) {
    const Eigen::MatrixXd real_logit = model.discriminator.forward(real);
    const Eigen::MatrixXd fake_logit = model.discriminator.forward(model.generator.forward(latents));
    double loss = 0.0;
    for (Eigen::Index i = 0; i < real_logit.cols(); ++i) loss += softplus(-real_logit(0, i)) / static_cast<double>(real_logit.cols());
    for (Eigen::Index i = 0; i < fake_logit.cols(); ++i) loss += softplus(fake_logit(0, i)) / static_cast<double>(fake_logit.cols());
    return loss;
}

MlpGradient discriminator_gradient(const GanModel& model, const Eigen::MatrixXd& real, const Eigen::MatrixXd& latents) {
    const Eigen::MatrixXd fake = model.generator.forward(latents);
    const auto real_trace = model.discriminator.forward_trace(real);
    const auto fake_trace = model.discriminator.forward_trace(fake);

    const double br = static_cast<double>(real.cols());
    const double bf = static_cast<double>(fake.cols());
    Eigen::MatrixXd real_grad = real_trace.back().unaryExpr([&](double a) { return (sigmoid(a) - 1.0) / br; });
    Eigen::MatrixXd fake_grad = fake_trace.back().unaryExpr([&](double a) { return sigmoid(a) / bf; });

    MlpGradient g_real;
    MlpGradient g_fake;
    model.discriminator.backward(real_trace, real_grad, &g_real);
    model.discriminator.backward(fake_trace, fake_grad, &g_fake);
    for (std::size_t l = 0; l < g_real.weights.size(); ++l) {
        g_real.weights[l] += g_fake.weights[l];
        g_real.bias[l] += g_fake.bias[l];
    }
    return g_real;
}

double generator_loss(const GanModel& model, const Eigen::MatrixXd& latents, GeneratorLoss kind) {
    const Eigen::MatrixXd logit = model.discriminator.forward(model.generator.forward(latents));
    const double b = static_cast<double>(logit.cols());
    double loss = 0.0;
    for (Eigen::Index i = 0; i < logit.cols(); ++i) {
        loss += kind == GeneratorLoss::NonSaturating ? softplus(-logit(0, i)) / b : -softplus(logit(0, i)) / b;
    }
    return loss;
}

MlpGradient generator_gradient(const GanModel& model, const Eigen::MatrixXd& latents, GeneratorLoss kind) {
    const auto gen_trace = model.generator.forward_trace(latents);
    const auto disc_trace = model.discriminator.forward_trace(gen_trace.back());
    const double b = static_cast<double>(latents.cols());
    const Eigen::MatrixXd logit_grad = disc_trace.back().unaryExpr([&](double a) {
        return kind == GeneratorLoss::NonSaturating ? (sigmoid(a) - 1.0) / b : -sigmoid(a) / b;
    });
    const Eigen::MatrixXd sample_grad = model.discriminator.backward(disc_trace, logit_grad, nullptr);
    MlpGradient grad;
    model.generator.backward(gen_trace, sample_grad, &grad);
    return grad;
}

namespace {

// Per-network optimizer state (Adam moments; unused for plain SGD).
class Stepper {
public:
    Stepper(const Mlp& net, const GanTrainConfig& config) : config_(config) {
        for (const auto& layer : net.layers()) {
            mw_.push_back(Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()));
            vw_.push_back(mw_.back());
            mb_.push_back(Eigen::VectorXd::Zero(layer.bias.size()));
            vb_.push_back(mb_.back());
        }
    }

    void descend(Mlp& net, const MlpGradient& g) {
        const double lr = config_.learning_rate;
        auto& layers = net.layers();
        if (config_.optimizer == GanOptimizer::Sgd) {
            for (std::size_t l = 0; l < layers.size(); ++l) {
                layers[l].weights -= lr * g.weights[l];
                layers[l].bias -= lr * g.bias[l];
            }
            return;
        }
        constexpr double beta1 = 0.9;
        constexpr double beta2 = 0.999;
        constexpr double eps = 1e-8;
        ++t_;
        const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
        for (std::size_t l = 0; l < layers.size(); ++l) {
            mw_[l] = beta1 * mw_[l] + (1.0 - beta1) * g.weights[l];
            vw_[l] = beta2 * vw_[l] + (1.0 - beta2) * g.weights[l].cwiseAbs2();
            mb_[l] = beta1 * mb_[l] + (1.0 - beta1) * g.bias[l];
            vb_[l] = beta2 * vb_[l] + (1.0 - beta2) * g.bias[l].cwiseAbs2();
            layers[l].weights.array() -= lr * (mw_[l].array() / c1) / ((vw_[l].array() / c2).sqrt() + eps);
            layers[l].bias.array() -= lr * (mb_[l].array() / c1) / ((vb_[l].array() / c2).sqrt() + eps);
        }
    }

private:
    const GanTrainConfig& config_;
    std::vector<Eigen::MatrixXd> mw_, vw_;
    std::vector<Eigen::VectorXd> mb_, vb_;
    long t_ = 0;
};

} // namespace

GanModel train(GanModel model, std::span<const Vector> real, const GanTrainConfig& config, Rng& rng, TrainLog* log) {
    config.validate();
    require(real.size() >= 2, "train: need at least two real samples");
    const std::size_t n = model.n();
    std::vector<Vector> normalized;
    normalized.reserve(real.size());
    for (const auto& x : real) {
        require(x.size() == n, "train: real sample size mismatch");
        normalized.push_back(model.normalizer.to_unit(x));
    }
    const Eigen::MatrixXd all_real = to_columns(normalized);
    const std::size_t batch = config.full_batch ? real.size() : std::min(config.batch_size, real.size());

    Stepper disc_step(model.discriminator, config);
    Stepper gen_step(model.generator, config);
    std::vector<std::size_t> order(real.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        if (!config.full_batch) {
            for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
        }
        for (std::size_t start = 0; start < real.size(); start += batch) {
            const std::size_t len = std::min(batch, real.size() - start);
            Eigen::MatrixXd real_batch;
            if (config.full_batch) {
                real_batch = all_real;
            } else {
                real_batch.resize(all_real.rows(), static_cast<Eigen::Index>(len));
                for (std::size_t c = 0; c < len; ++c) real_batch.col(static_cast<Eigen::Index>(c)) = all_real.col(static_cast<Eigen::Index>(order[start + c]));
            }
            const Eigen::MatrixXd latents = to_columns(sample_latent(len, model.latent_dim(), rng));

            const double d_loss = discriminator_loss(model, real_batch, latents);
            if (!std::isfinite(d_loss)) {
                throw Error("GAN training diverged (non-finite discriminator loss); lower the learning rate");
            }
            disc_step.descend(model.discriminator, discriminator_gradient(model, real_batch, latents));
            if (log != nullptr) log->discriminator_loss.push_back(d_loss);

            if (config.update_generator) {
                const double g_loss = generator_loss(model, latents, config.generator_loss);
                if (!std::isfinite(g_loss)) {
                    throw Error("GAN training diverged (non-finite generator loss); lower the learning rate");
                }
                gen_step.descend(model.generator, generator_gradient(model, latents, config.generator_loss));
                if (log != nullptr) log->generator_loss.push_back(g_loss);
            }
        }
        if (!model.generator.finite() || !model.discriminator.finite()) {
            throw Error("GAN training produced non-finite parameters; lower the learning rate");
        }
    }
    return model;
}

namespace {

void write_network(std::ostream& out, const char* tag, const Mlp& net) {
    const auto sizes = net.sizes();
    out << tag << ' ' << sizes.size();
    for (std::size_t s : sizes) out << ' ' << s;
    out << ' ' << activation_name(net.layers().front().activation) << ' '
        << activation_name(net.layers().back().activation) << '\n';
    for (const auto& layer : net.layers()) {
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) out << (c ? " " : "") << layer.weights(r, c);
            out << '\n';
        }
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r) out << (r ? " " : "") << layer.bias(r);
        out << '\n';
    }
}

Mlp read_network(std::istream& in, const std::string& tag) {
    std::string word;
    std::size_t count = 0;
    if (!(in >> word) || word != tag || !(in >> count) || count < 2) {
        throw Error("load_model: expected '" + tag + "' section");
    }
    std::vector<std::size_t> sizes(count);
    for (auto& s : sizes) {
        if (!(in >> s)) throw Error("load_model: truncated layer sizes");
    }
    std::string hidden, output;
    in >> hidden >> output;
    Mlp net(sizes, parse_activation(hidden), parse_activation(output));
    for (std::size_t i = 0; i < net.parameter_count(); ++i) {
        if (!(in >> net.parameter(i))) throw Error("load_model: truncated parameters");
    }
    return net;
}

} // namespace

void save_model(const GanModel& model, std::ostream& out) {
    const auto old_precision = out.precision(17);
    out << "lmef-gan 1\n";
    out << "normalizer " << model.n() << '\n';
    for (std::size_t i = 0; i < model.n(); ++i) out << (i ? " " : "") << model.normalizer.bounds.lower[i];
    out << '\n';
    for (std::size_t i = 0; i < model.n(); ++i) out << (i ? " " : "") << model.normalizer.bounds.upper[i];
    out << '\n';
    write_network(out, "generator", model.generator);
    write_network(out, "discriminator", model.discriminator);
    out.precision(old_precision);
}

GanModel load_model(std::istream& in) {
    std::string word;
    int version = 0;
    if (!(in >> word >> version) || word != "lmef-gan" || version != 1) {
        throw Error("load_model: not an lmef-gan v1 file");
    }
    std::size_t n = 0;
    if (!(in >> word >> n) || word != "normalizer") throw Error("load_model: missing normalizer");
    GanModel model;
    model.normalizer.bounds.lower.resize(n);
    model.normalizer.bounds.upper.resize(n);
    for (auto& v : model.normalizer.bounds.lower) in >> v;
    for (auto& v : model.normalizer.bounds.upper) in >> v;
    if (!in) throw Error("load_model: truncated bounds");
    model.generator = read_network(in, "generator");
    model.discriminator = read_network(in, "discriminator");
    return model;
}

} // namespace lmef
