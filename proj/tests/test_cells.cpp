#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "repad/cells.hpp"
#include "repad/errors.hpp"

using namespace repad;

namespace {

// Addresses of every scalar parameter, in a stable order.
std::vector<double*> param_ptrs(CellParameters& p) {
    std::vector<double*> ptrs;
    for (auto& g : p.gates) {
        for (auto& v : g.w_in) ptrs.push_back(&v);
        for (auto& v : g.w_rec) ptrs.push_back(&v);
        for (auto& v : g.bias) ptrs.push_back(&v);
    }
    for (auto& v : p.w_out) ptrs.push_back(&v);
    ptrs.push_back(&p.b_out);
    return ptrs;
}

void randomize(CellParameters& p, std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(-0.8, 0.8);
    for (double* v : param_ptrs(p)) *v = dist(rng);
}

// Loss recomputed from forward() alone; the finite-difference oracle must
// not share code with the backward pass.
double mse_from_forward(const CellParameters& p, std::span<const double> xs,
                        std::span<const double> ds) {
    auto ys = forward(p, xs).outputs;
    double acc = 0.0;
    for (std::size_t t = 0; t < ys.size(); ++t) {
        acc += (ys[t] - ds[t]) * (ys[t] - ds[t]);
    }
    return acc / static_cast<double>(ys.size());
}

bool gradcheck_instance(CellKind kind, std::size_t hidden, std::mt19937& rng,
                        double* worst_rel) {
    CellParameters p = init_parameters(kind, hidden, rng());
    randomize(p, rng);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> xs(3), ds(3);
    for (auto& x : xs) x = dist(rng);
    for (auto& d : ds) d = dist(rng);

    const CellGradients analytic = gradients(p, xs, ds);
    CellParameters probe = p;
    auto probe_ptrs = param_ptrs(probe);
    CellGradients analytic_copy = analytic;
    auto grad_ptrs = param_ptrs(analytic_copy);

    const double h = 1e-5;
    bool ok = true;
    for (std::size_t i = 0; i < probe_ptrs.size(); ++i) {
        const double saved = *probe_ptrs[i];
        *probe_ptrs[i] = saved + h;
        const double up = mse_from_forward(probe, xs, ds);
        *probe_ptrs[i] = saved - h;
        const double down = mse_from_forward(probe, xs, ds);
        *probe_ptrs[i] = saved;
        const double fd = (up - down) / (2.0 * h);
        const double got = *grad_ptrs[i];
        const double err = std::abs(got - fd);
        const double tol = std::max(1e-8, 1e-4 * std::max(std::abs(got), std::abs(fd)));
        const double rel = err / std::max(1.0e-12, std::max(std::abs(got), std::abs(fd)));
        if (worst_rel) *worst_rel = std::max(*worst_rel, rel);
        if (err > tol) ok = false;
    }
    return ok;
}

CellParameters zero_params(CellKind kind, std::size_t hidden) {
    CellParameters p = init_parameters(kind, hidden, 1);
    for (double* v : param_ptrs(p)) *v = 0.0;
    return p;
}

}  // namespace

TEST_SUITE("cells") {

TEST_CASE("parameter counts follow the shape arithmetic") {
    const auto rnn = init_parameters(CellKind::VanillaRnn, 10, 140);
    const auto lstm = init_parameters(CellKind::Lstm, 10, 140);
    const auto gru = init_parameters(CellKind::Gru, 10, 140);

    // 10*(1 + 10 + 1) + 10 + 1 per gate-equivalent block
    CHECK(parameter_count(rnn) == 131);
    CHECK(parameter_count(lstm) == 4 * 120 + 11);
    CHECK(parameter_count(gru) == 3 * 120 + 11);
    CHECK(parameter_count(gru) < parameter_count(lstm));

    for (std::size_t h : {1, 2, 7}) {
        const auto p = init_parameters(CellKind::Lstm, h, 9);
        CHECK(parameter_count(p) == 4 * (h + h * h + h) + h + 1);
    }
}

TEST_CASE("initialization is deterministic and seeded") {
    const auto a = init_parameters(CellKind::Lstm, 10, 140);
    const auto b = init_parameters(CellKind::Lstm, 10, 140);
    auto pa = param_ptrs(const_cast<CellParameters&>(a));
    auto pb = param_ptrs(const_cast<CellParameters&>(b));
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(*pa[i] == *pb[i]);

    const auto c = init_parameters(CellKind::Lstm, 10, 141);
    auto pc = param_ptrs(const_cast<CellParameters&>(c));
    bool any_diff = false;
    for (std::size_t i = 0; i < pa.size(); ++i) any_diff |= (*pa[i] != *pc[i]);
    CHECK(any_diff);

    for (const auto& g : a.gates) {
        for (double v : g.bias) CHECK(v == 0.0);
    }
    CHECK(a.b_out == 0.0);
}

TEST_CASE("zero hidden units is rejected") {
    CHECK_THROWS_AS(init_parameters(CellKind::Gru, 0, 1), InvalidConfigError);
}

TEST_CASE("forward: zero parameters give zero outputs") {
    const std::vector<double> xs{0.3, -1.2, 2.5};
    for (CellKind kind :
         {CellKind::VanillaRnn, CellKind::Lstm, CellKind::Gru}) {
        const auto p = zero_params(kind, 4);
        const auto r = forward(p, xs);
        REQUIRE(r.outputs.size() == xs.size());
        for (double y : r.outputs) CHECK(y == 0.0);
    }
}

TEST_CASE("forward: one-step vanilla output matches direct arithmetic") {
    std::mt19937 rng(77);
    auto p = init_parameters(CellKind::VanillaRnn, 5, 77);
    randomize(p, rng);
    const double x = 0.42;
    double expected = p.b_out;
    for (std::size_t i = 0; i < p.hidden_dim; ++i) {
        expected += p.w_out[i] *
                    std::tanh(p.gates[0].w_in[i] * x + p.gates[0].bias[i]);
    }
    const auto r = forward(p, std::vector<double>{x});
    CHECK(r.outputs[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("forward is pure") {
    std::mt19937 rng(5);
    for (CellKind kind :
         {CellKind::VanillaRnn, CellKind::Lstm, CellKind::Gru}) {
        auto p = init_parameters(kind, 6, 123);
        randomize(p, rng);
        const std::vector<double> xs{0.1, -0.7, 0.9, 0.0};
        const auto a = forward(p, xs);
        const auto b = forward(p, xs);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            CHECK(a.outputs[i] == b.outputs[i]);
        }
    }
}

TEST_CASE("forward rejects bad input") {
    const auto p = init_parameters(CellKind::Lstm, 3, 1);
    CHECK_THROWS_AS(forward(p, std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(
        forward(p, std::vector<double>{1.0, std::nan(""), 2.0}),
        NumericInputError);
}

TEST_CASE("gradients: zero residual means zero gradients") {
    const auto p = zero_params(CellKind::Lstm, 4);
    const std::vector<double> xs{0.5, -0.5, 0.25};
    const std::vector<double> ds{0.0, 0.0, 0.0};  // outputs are exactly zero
    auto g = gradients(p, xs, ds);
    for (double* v : param_ptrs(g)) CHECK(*v == 0.0);
}

TEST_CASE("gradients: length mismatch is rejected") {
    const auto p = init_parameters(CellKind::Gru, 3, 2);
    CHECK_THROWS_AS(
        gradients(p, std::vector<double>{1.0, 2.0}, std::vector<double>{1.0}),
        std::invalid_argument);
}

TEST_CASE("gradients match central finite differences") {
    std::mt19937 rng(2024);
    for (CellKind kind :
         {CellKind::VanillaRnn, CellKind::Lstm, CellKind::Gru}) {
        for (std::size_t hidden : {std::size_t{2}, std::size_t{10}}) {
            for (int i = 0; i < 4; ++i) {
                double worst = 0.0;
                const bool ok = gradcheck_instance(kind, hidden, rng, &worst);
                INFO("kind=" << to_string(kind) << " hidden=" << hidden
                             << " worst rel err=" << worst);
                CHECK(ok);
            }
        }
    }
}

TEST_CASE("output-bias gradient is linear in the residual") {
    std::mt19937 rng(31);
    auto p = init_parameters(CellKind::VanillaRnn, 6, 31);
    randomize(p, rng);
    const std::vector<double> xs{0.2, -0.4, 0.6};
    const std::vector<double> ds{0.1, 0.3, -0.2};
    const auto ys = forward(p, xs).outputs;

    const double c = 3.5;
    std::vector<double> scaled(3);
    for (int i = 0; i < 3; ++i) scaled[i] = ys[i] - c * (ys[i] - ds[i]);

    const auto g1 = gradients(p, xs, ds);
    const auto g2 = gradients(p, xs, scaled);
    CHECK(g2.b_out == doctest::Approx(c * g1.b_out).epsilon(1e-9));
}

TEST_CASE("normalizer: fit and exact round-trip") {
    const std::vector<double> w{1.0, 2.0, 3.0};
    const auto n = WindowNormalizer::fit(w);
    CHECK(n.shift == doctest::Approx(2.0));
    CHECK(n.scale == doctest::Approx(std::sqrt(2.0 / 3.0)));

    std::mt19937 rng(8);
    std::uniform_real_distribution<double> dist(-2000.0, 2000.0);
    for (int i = 0; i < 200; ++i) {
        const double x = dist(rng);
        const double rt = n.denormalize(n.normalize(x));
        CHECK(std::abs(rt - x) <= 1e-12 * std::max(1.0, std::abs(x)));
    }

    const std::vector<double> c{7.0, 7.0, 7.0};
    CHECK(WindowNormalizer::fit(c).scale == doctest::Approx(1e-8));
}

TEST_CASE("train_window: constant windows are learned exactly") {
    for (CellKind kind :
         {CellKind::VanillaRnn, CellKind::Lstm, CellKind::Gru}) {
        const std::vector<double> w{42.0, 42.0, 42.0};
        const auto m = train_window(kind, w, TrainingConfig{});
        const double pred = predict_next(m.params, m.normalizer, w);
        CHECK(std::abs(pred - 42.0) <= 0.05 * 42.0);
    }
}

TEST_CASE("train_window is deterministic") {
    const std::vector<double> w{1010.0, 995.0, 1022.0};
    const auto a = train_window(CellKind::Lstm, w, TrainingConfig{});
    const auto b = train_window(CellKind::Lstm, w, TrainingConfig{});
    auto pa = param_ptrs(const_cast<CellParameters&>(a.params));
    auto pb = param_ptrs(const_cast<CellParameters&>(b.params));
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(*pa[i] == *pb[i]);
    CHECK(a.normalizer.shift == b.normalizer.shift);
    CHECK(a.normalizer.scale == b.normalizer.scale);
}

TEST_CASE("training reduces (or holds) the loss relative to one epoch") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> dist(800.0, 1400.0);
    for (CellKind kind :
         {CellKind::VanillaRnn, CellKind::Lstm, CellKind::Gru}) {
        for (int trial = 0; trial < 5; ++trial) {
            const std::vector<double> w{dist(rng), dist(rng), dist(rng)};
            TrainingConfig one;
            one.epochs = 1;
            TrainingConfig full;  // 50 epochs
            const auto m1 = train_window(kind, w, one);
            const auto m50 = train_window(kind, w, full);

            std::vector<double> xs(3);
            for (int i = 0; i < 3; ++i) xs[i] = m50.normalizer.normalize(w[i]);
            const std::vector<double> in{xs[0], xs[1]};
            const std::vector<double> tg{xs[1], xs[2]};
            CHECK(mse_from_forward(m50.params, in, tg) <=
                  mse_from_forward(m1.params, in, tg) + 1e-12);
        }
    }
}

TEST_CASE("train_window rejects non-finite windows") {
    const std::vector<double> w{1.0, std::numeric_limits<double>::infinity(), 2.0};
    CHECK_THROWS_AS(train_window(CellKind::Lstm, w, TrainingConfig{}),
                    NumericInputError);
}

TEST_CASE("predict_next: zero model with identity normalizer returns zero") {
    const auto p = zero_params(CellKind::VanillaRnn, 4);
    WindowNormalizer n;  // shift 0, scale 1
    CHECK(predict_next(p, n, std::vector<double>{1.0, 2.0, 3.0}) == 0.0);
}

TEST_CASE("sentinel-scale windows stay finite for every cell kind") {
    const std::vector<double> windows[] = {
        {-200.0, 1020.5, 998.0},
        {-200.0, -200.0, -200.0},
        {1893.2, -200.0, 1776.1},
    };
    for (CellKind kind :
         {CellKind::VanillaRnn, CellKind::Lstm, CellKind::Gru}) {
        for (const auto& w : windows) {
            const auto m = train_window(kind, w, TrainingConfig{});
            for (double* v : param_ptrs(const_cast<CellParameters&>(m.params))) {
                CHECK(std::isfinite(*v));
            }
            CHECK(std::isfinite(predict_next(m.params, m.normalizer, w)));
            // Prediction windows far outside the training range saturate
            // but stay finite.
            CHECK(std::isfinite(predict_next(m.params, m.normalizer,
                                             std::vector<double>{5e4, -5e4, 0.0})));
        }
    }
}

}  // TEST_SUITE
