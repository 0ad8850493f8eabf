#include <doctest.h>

#include <sstream>

#include "lmef/error.hpp"
#include "lmef/gan.hpp"
#include "test_support.hpp"

using namespace lmef;

namespace {

Bounds box(std::size_t n, double lo = 0.0, double hi = 10.0) { return Bounds{Vector(n, lo), Vector(n, hi)}; }

double relative_error(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-7}); }

} // namespace

TEST_CASE("gan shapes") {
    Rng rng(1);
    const auto model = make_gan(box(8), rng);
    CHECK(model.generator.sizes() == std::vector<std::size_t>{7, 12, 8});
    CHECK(model.discriminator.sizes() == std::vector<std::size_t>{8, 12, 1});
    CHECK(model.latent_dim() == 7);
    CHECK(model.generator.finite());
    CHECK(model.generator.parameter_count() == 7 * 12 + 12 + 12 * 8 + 8);
    CHECK_THROWS_AS(make_gan(box(1), rng), PreconditionError);

    GanShape deep;
    deep.hidden_layers = 2;
    CHECK(make_gan(box(5), rng, deep).generator.sizes() == std::vector<std::size_t>{4, 8, 8, 5});
}

TEST_CASE("glorot initialization bounds") {
    Rng rng(2);
    Mlp net({6, 10, 4}, Activation::Tanh, Activation::Tanh);
    net.init_glorot(rng);
    const double a0 = std::sqrt(6.0 / 16.0), a1 = std::sqrt(6.0 / 14.0);
    for (auto v : net.layers()[0].weights.reshaped()) CHECK(std::abs(v) <= a0);
    for (auto v : net.layers()[1].weights.reshaped()) CHECK(std::abs(v) <= a1);
}

TEST_CASE("normalizer round trip") {
    Normalizer norm{Bounds{{0.0, -5.0, 2.0}, {1.0, 5.0, 3.0}}};
    CHECK(norm.to_unit(Vector{0.0, -5.0, 2.0}) == Vector{-1.0, -1.0, -1.0});
    CHECK(norm.to_unit(Vector{1.0, 5.0, 3.0}) == Vector{1.0, 1.0, 1.0});
    Rng rng(3);
    for (int t = 0; t < 1000; ++t) {
        const Vector x{rng.uniform(), rng.uniform(-5, 5), rng.uniform(2, 3)};
        const auto back = norm.from_unit(norm.to_unit(x));
        for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(back[i] - x[i]) <= 1e-12);
    }
}

TEST_CASE("latent sampling") {
    Rng rng(4), again(4);
    const auto z = sample_latent(100000, 3, rng);
    Vector mean(3, 0.0);
    for (const auto& v : z)
        for (std::size_t i = 0; i < 3; ++i) {
            REQUIRE(v[i] >= -1.0);
            REQUIRE(v[i] <= 1.0);
            mean[i] += v[i] / 100000.0;
        }
    for (double m : mean) CHECK(std::abs(m) < 0.02);
    CHECK(sample_latent(5, 3, again) == std::vector<Vector>(z.begin(), z.begin() + 5));
}

TEST_CASE("generate and discriminate contracts") {
    Rng rng(5);
    auto model = make_gan(box(6, -2.0, 4.0), rng);
    for (const auto& z : sample_latent(1000, 5, rng)) {
        const auto x = generate(model, z);
        REQUIRE(x.size() == 6);
        REQUIRE(model.normalizer.bounds.contains(x));
        const double p = discriminate(model, x);
        REQUIRE(p > 0.0);
        REQUIRE(p < 1.0);
    }
    const Vector z(5, 0.3);
    CHECK(generate(model, z) == generate(model, z));
    CHECK_THROWS_AS(generate(model, Vector(4, 0.0)), PreconditionError);
    CHECK_THROWS_AS(discriminate(model, Vector(5, 0.0)), PreconditionError);

    auto& last = model.generator.layers().back();
    last.weights.setZero();
    last.bias.setZero();
    for (double v : generate(model, z)) CHECK(v == doctest::Approx(1.0));

    for (auto& layer : model.discriminator.layers()) {
        layer.weights.setZero();
        layer.bias.setZero();
    }
    CHECK(discriminate(model, Vector(6, 1.0)) == 0.5);
    CHECK(discriminate(model, Vector(6, 3.0)) == discriminate(model, Vector(6, 3.0)));
}

TEST_CASE("analytic gradients match central differences") {
    Rng rng(6);
    const double h = 1e-5;
    for (int net = 0; net < 12; ++net) {
        const std::size_t n = 2 + rng.index(7);
        auto model = make_gan(box(n), rng);
        const auto real = to_columns(testing::random_points(rng, 5, n, -1.0, 1.0));
        const auto latents = to_columns(sample_latent(5, n - 1, rng));

        const auto dgrad = discriminator_gradient(model, real, latents);
        REQUIRE(dgrad.size() == model.discriminator.parameter_count());
        for (int c = 0; c < 20; ++c) {
            const std::size_t i = rng.index(dgrad.size());
            double& w = model.discriminator.parameter(i);
            const double keep = w;
            w = keep + h;
            const double up = discriminator_loss(model, real, latents);
            w = keep - h;
            const double down = discriminator_loss(model, real, latents);
            w = keep;
            CHECK(relative_error(dgrad.flat(i), (up - down) / (2 * h)) <= 1e-4);
        }

        for (auto kind : {GeneratorLoss::NonSaturating, GeneratorLoss::Minimax}) {
            const auto ggrad = generator_gradient(model, latents, kind);
            REQUIRE(ggrad.size() == model.generator.parameter_count());
            for (int c = 0; c < 20; ++c) {
                const std::size_t i = rng.index(ggrad.size());
                double& w = model.generator.parameter(i);
                const double keep = w;
                w = keep + h;
                const double up = generator_loss(model, latents, kind);
                w = keep - h;
                const double down = generator_loss(model, latents, kind);
                w = keep;
                CHECK(relative_error(ggrad.flat(i), (up - down) / (2 * h)) <= 1e-4);
            }
        }
    }
}

TEST_CASE("mlp input gradient") {
    Rng rng(7);
    Mlp net({3, 5, 2}, Activation::Tanh, Activation::Sigmoid);
    net.init_glorot(rng);
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 1);
    const Eigen::MatrixXd upstream = Eigen::MatrixXd::Ones(2, 1);
    const Eigen::MatrixXd dx = net.backward(net.forward_trace(x), upstream, nullptr);
    for (Eigen::Index i = 0; i < 3; ++i) {
        Eigen::MatrixXd a = x, b = x;
        a(i, 0) += 1e-6;
        b(i, 0) -= 1e-6;
        CHECK(dx(i, 0) == doctest::Approx((net.forward(a).sum() - net.forward(b).sum()) / 2e-6).epsilon(1e-6));
    }
}

TEST_CASE("training moves generated mean toward the data") {
    Rng rng(8);
    // n = 2 so the latent is 1-D; both genes of every real sample sit at +0.5 normalized.
    const Bounds bounds = box(2, -1.0, 1.0);
    auto model = make_gan(bounds, rng);
    const std::vector<Vector> real(20, Vector{0.5, 0.5});
    auto mean_of = [&](const GanModel& m, Rng& r) {
        double s = 0;
        for (const auto& x : generate_all(m, sample_latent(500, 1, r))) s += (x[0] + x[1]) / 2;
        return s / 500;
    };
    Rng r1(9), r2(9);
    const double before = mean_of(model, r1);
    GanTrainConfig config;
    config.epochs = 300;
    config.learning_rate = 0.05;
    const auto trained = train(model, real, config, rng);
    const double after = mean_of(trained, r2);
    CHECK(std::abs(after - 0.5) < std::abs(before - 0.5));
}

TEST_CASE("discriminator loss falls with the generator frozen") {
    Rng rng(10);
    auto model = make_gan(box(4), rng);
    const auto real = testing::random_points(rng, 30, 4, 6.0, 9.0);
    GanTrainConfig config;
    config.epochs = 10;
    config.update_generator = false;
    TrainLog log;
    train(model, real, config, rng, &log);
    REQUIRE(log.discriminator_loss.size() == 10);
    CHECK(log.discriminator_loss.back() < log.discriminator_loss.front());
    CHECK(log.generator_loss.empty());
}

TEST_CASE("training is deterministic and validates its inputs") {
    const auto run = [] {
        Rng rng(11);
        auto model = make_gan(box(5), rng);
        const auto real = testing::random_points(rng, 10, 5, 0.0, 10.0);
        GanTrainConfig config;
        config.epochs = 20;
        return train(model, real, config, rng);
    };
    const auto a = run(), b = run();
    for (std::size_t i = 0; i < a.generator.parameter_count(); ++i)
        REQUIRE(a.generator.parameter(i) == b.generator.parameter(i));

    Rng rng(12);
    auto model = make_gan(box(3), rng);
    GanTrainConfig config;
    CHECK_THROWS_AS(train(model, std::vector<Vector>{{1, 1, 1}}, config, rng), PreconditionError);
    config.learning_rate = 0.0;
    CHECK_THROWS_AS(config.validate(), PreconditionError);
    config.learning_rate = 0.001;
    model.discriminator.parameter(0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(train(model, testing::random_points(rng, 5, 3, 0, 10), config, rng), Error);
}

TEST_CASE("adam and minibatch modes train") {
    Rng rng(13);
    auto model = make_gan(box(4), rng);
    const auto real = testing::random_points(rng, 40, 4, 0.0, 10.0);
    GanTrainConfig config;
    config.epochs = 20;
    config.optimizer = GanOptimizer::Adam;
    config.full_batch = false;
    config.batch_size = 8;
    CHECK(train(model, real, config, rng).generator.finite());
}

TEST_CASE("model save and load round trip") {
    Rng rng(14);
    const auto model = make_gan(Bounds{{0, -1, 2}, {1, 1, 5}}, rng);
    std::stringstream buffer;
    save_model(model, buffer);
    const auto loaded = load_model(buffer);
    CHECK(loaded.generator.sizes() == model.generator.sizes());
    CHECK(loaded.normalizer.bounds.lower == model.normalizer.bounds.lower);
    CHECK(loaded.normalizer.bounds.upper == model.normalizer.bounds.upper);
    for (std::size_t i = 0; i < model.discriminator.parameter_count(); ++i)
        CHECK(loaded.discriminator.parameter(i) == model.discriminator.parameter(i));
    std::stringstream junk("not a model");
    CHECK_THROWS(load_model(junk));
}
