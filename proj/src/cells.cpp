#include "repad/cells.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "repad/errors.hpp"

namespace repad {
namespace {

constexpr double kScaleFloor = 1e-8;
constexpr double kGradClip = 5.0;

double stable_sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Draw in [0,1) from the raw 32-bit stream; keeps initialization identical
// across standard libraries (uniform_real_distribution is not portable).
double uniform01(std::mt19937& rng) {
    return std::ldexp(static_cast<double>(rng()), -32);
}

void check_finite(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw NumericInputError(std::string(what) +
                                    " contains a non-finite value");
        }
    }
}

// out += W * v, with W row-major [n x n].
void matvec_add(const std::vector<double>& w, const std::vector<double>& v,
                std::vector<double>& out) {
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        const double* row = w.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) acc += row[j] * v[j];
        out[i] += acc;
    }
}

// out += W^T * v.
void matvec_t_add(const std::vector<double>& w, const std::vector<double>& v,
                  std::vector<double>& out) {
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double vi = v[i];
        const double* row = w.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) out[j] += row[j] * vi;
    }
}

// grad_block += da * [x ; h_prev ; 1]
void accumulate_block(GateBlock& g, const std::vector<double>& da, double x,
                      const std::vector<double>& h_prev) {
    const std::size_t n = da.size();
    for (std::size_t i = 0; i < n; ++i) {
        g.w_in[i] += da[i] * x;
        g.bias[i] += da[i];
        double* row = g.w_rec.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) row[j] += da[i] * h_prev[j];
    }
}

std::vector<double> gate_preact(const GateBlock& g, double x,
                                const std::vector<double>& h_prev) {
    const std::size_t n = g.bias.size();
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = g.w_in[i] * x + g.bias[i];
    matvec_add(g.w_rec, h_prev, a);
    return a;
}

struct StepCache {
    // Per-kind activations needed by the backward pass.
    std::vector<double> h;       // hidden after this step (all kinds)
    std::vector<double> i, f, g, o, c, tc;  // LSTM
    std::vector<double> z, r, n, rh;        // GRU (rh = r .* h_prev)
};

// p -= lr * clamp(g, +-kGradClip), element by element.
void apply_gradient_step(CellParameters& p, const CellGradients& g, double lr) {
    auto step = [lr](double& w, double gw) {
        w -= lr * std::clamp(gw, -kGradClip, kGradClip);
    };
    for (std::size_t gi = 0; gi < p.gates.size(); ++gi) {
        auto& pg = p.gates[gi];
        const auto& gg = g.gates[gi];
        for (std::size_t k = 0; k < pg.w_in.size(); ++k) step(pg.w_in[k], gg.w_in[k]);
        for (std::size_t k = 0; k < pg.w_rec.size(); ++k) step(pg.w_rec[k], gg.w_rec[k]);
        for (std::size_t k = 0; k < pg.bias.size(); ++k) step(pg.bias[k], gg.bias[k]);
    }
    for (std::size_t k = 0; k < p.w_out.size(); ++k) step(p.w_out[k], g.w_out[k]);
    step(p.b_out, g.b_out);
}

CellGradients zeros_like(const CellParameters& p) {
    CellGradients g;
    g.kind = p.kind;
    g.hidden_dim = p.hidden_dim;
    g.gates.resize(p.gates.size());
    for (std::size_t i = 0; i < p.gates.size(); ++i) {
        g.gates[i].w_in.assign(p.hidden_dim, 0.0);
        g.gates[i].w_rec.assign(p.hidden_dim * p.hidden_dim, 0.0);
        g.gates[i].bias.assign(p.hidden_dim, 0.0);
    }
    g.w_out.assign(p.hidden_dim, 0.0);
    g.b_out = 0.0;
    return g;
}

// Runs the sequence, returning outputs and (optionally) every intermediate
// activation the backward pass needs.
std::vector<double> run_forward(const CellParameters& p,
                                std::span<const double> inputs,
                                std::vector<StepCache>* caches,
                                std::vector<double>* final_h,
                                std::vector<double>* final_c) {
    const std::size_t n = p.hidden_dim;
    const std::size_t steps = inputs.size();
    std::vector<double> h(n, 0.0);
    std::vector<double> c(n, 0.0);  // LSTM cell state
    std::vector<double> outputs(steps);
    if (caches) caches->resize(steps);

    for (std::size_t t = 0; t < steps; ++t) {
        const double x = inputs[t];
        StepCache* cache = caches ? &(*caches)[t] : nullptr;

        switch (p.kind) {
        case CellKind::VanillaRnn: {
            auto a = gate_preact(p.gates[0], x, h);
            for (std::size_t i = 0; i < n; ++i) h[i] = std::tanh(a[i]);
            break;
        }
        case CellKind::Lstm: {
            auto ai = gate_preact(p.gates[0], x, h);
            auto af = gate_preact(p.gates[1], x, h);
            auto ag = gate_preact(p.gates[2], x, h);
            auto ao = gate_preact(p.gates[3], x, h);
            std::vector<double> iv(n), fv(n), gv(n), ov(n), tc(n);
            for (std::size_t i = 0; i < n; ++i) {
                iv[i] = stable_sigmoid(ai[i]);
                fv[i] = stable_sigmoid(af[i]);
                gv[i] = std::tanh(ag[i]);
                ov[i] = stable_sigmoid(ao[i]);
                c[i] = fv[i] * c[i] + iv[i] * gv[i];
                tc[i] = std::tanh(c[i]);
                h[i] = ov[i] * tc[i];
            }
            if (cache) {
                cache->i = iv;
                cache->f = fv;
                cache->g = gv;
                cache->o = ov;
                cache->c = c;
                cache->tc = tc;
            }
            break;
        }
        case CellKind::Gru: {
            auto az = gate_preact(p.gates[0], x, h);
            auto ar = gate_preact(p.gates[1], x, h);
            std::vector<double> zv(n), rv(n), rh(n);
            for (std::size_t i = 0; i < n; ++i) {
                zv[i] = stable_sigmoid(az[i]);
                rv[i] = stable_sigmoid(ar[i]);
                rh[i] = rv[i] * h[i];
            }
            auto an = gate_preact(p.gates[2], x, rh);
            std::vector<double> nv(n);
            std::vector<double> h_new(n);
            for (std::size_t i = 0; i < n; ++i) {
                nv[i] = std::tanh(an[i]);
                h_new[i] = (1.0 - zv[i]) * nv[i] + zv[i] * h[i];
            }
            h = h_new;
            if (cache) {
                cache->z = zv;
                cache->r = rv;
                cache->n = nv;
                cache->rh = rh;
            }
            break;
        }
        }

        double y = p.b_out;
        for (std::size_t i = 0; i < n; ++i) y += p.w_out[i] * h[i];
        outputs[t] = y;
        if (cache) cache->h = h;
    }

    if (final_h) *final_h = h;
    if (final_c) *final_c = (p.kind == CellKind::Lstm) ? c : std::vector<double>{};
    return outputs;
}

}  // namespace

const char* to_string(CellKind kind) {
    switch (kind) {
    case CellKind::VanillaRnn: return "rnn";
    case CellKind::Lstm: return "lstm";
    case CellKind::Gru: return "gru";
    }
    return "unknown";
}

std::size_t gate_count(CellKind kind) {
    switch (kind) {
    case CellKind::VanillaRnn: return 1;
    case CellKind::Lstm: return 4;
    case CellKind::Gru: return 3;
    }
    return 0;
}

WindowNormalizer WindowNormalizer::fit(std::span<const double> window) {
    if (window.empty()) throw NumericInputError("normalizer window is empty");
    check_finite(window, "normalizer window");
    double mean = 0.0;
    for (double v : window) mean += v;
    mean /= static_cast<double>(window.size());
    double var = 0.0;
    for (double v : window) var += (v - mean) * (v - mean);
    var /= static_cast<double>(window.size());
    WindowNormalizer n;
    n.shift = mean;
    n.scale = std::max(std::sqrt(var), kScaleFloor);
    return n;
}

CellParameters init_parameters(CellKind kind, std::size_t hidden_dim,
                               std::uint32_t seed) {
    if (hidden_dim == 0) {
        throw InvalidConfigError("hidden_dim must be at least 1");
    }
    std::mt19937 rng(seed);
    auto fill_uniform = [&rng](std::vector<double>& v, double limit) {
        for (double& x : v) x = (2.0 * uniform01(rng) - 1.0) * limit;
    };

    CellParameters p;
    p.kind = kind;
    p.hidden_dim = hidden_dim;
    p.gates.resize(gate_count(kind));
    const double h = static_cast<double>(hidden_dim);
    const double in_limit = std::sqrt(6.0 / (1.0 + h));
    const double rec_limit = std::sqrt(6.0 / (h + h));
    const double out_limit = std::sqrt(6.0 / (h + 1.0));
    for (auto& g : p.gates) {
        g.w_in.resize(hidden_dim);
        g.w_rec.resize(hidden_dim * hidden_dim);
        g.bias.assign(hidden_dim, 0.0);
        fill_uniform(g.w_in, in_limit);
        fill_uniform(g.w_rec, rec_limit);
    }
    p.w_out.resize(hidden_dim);
    fill_uniform(p.w_out, out_limit);
    p.b_out = 0.0;
    return p;
}

std::size_t parameter_count(const CellParameters& p) {
    std::size_t count = p.w_out.size() + 1;
    for (const auto& g : p.gates) {
        count += g.w_in.size() + g.w_rec.size() + g.bias.size();
    }
    return count;
}

ForwardResult forward(const CellParameters& params,
                      std::span<const double> inputs) {
    if (inputs.empty()) throw std::invalid_argument("forward: empty input");
    check_finite(inputs, "forward input");
    ForwardResult r;
    r.outputs = run_forward(params, inputs, nullptr, &r.final_hidden,
                            &r.final_cell);
    return r;
}

double sequence_loss(const CellParameters& params,
                     std::span<const double> inputs,
                     std::span<const double> targets) {
    if (inputs.size() != targets.size() || inputs.empty()) {
        throw std::invalid_argument("sequence_loss: length mismatch");
    }
    check_finite(inputs, "loss input");
    check_finite(targets, "loss target");
    auto ys = run_forward(params, inputs, nullptr, nullptr, nullptr);
    double loss = 0.0;
    for (std::size_t t = 0; t < ys.size(); ++t) {
        const double e = ys[t] - targets[t];
        loss += e * e;
    }
    return loss / static_cast<double>(ys.size());
}

CellGradients gradients(const CellParameters& params,
                        std::span<const double> inputs,
                        std::span<const double> targets) {
    if (inputs.size() != targets.size() || inputs.empty()) {
        throw std::invalid_argument("gradients: length mismatch");
    }
    check_finite(inputs, "gradient input");
    check_finite(targets, "gradient target");

    const std::size_t n = params.hidden_dim;
    const std::size_t steps = inputs.size();
    std::vector<StepCache> caches;
    auto ys = run_forward(params, inputs, &caches, nullptr, nullptr);

    CellGradients grad = zeros_like(params);
    const double inv_n = 1.0 / static_cast<double>(steps);

    std::vector<double> dh_next(n, 0.0);
    std::vector<double> dc_next(n, 0.0);
    const std::vector<double> zero(n, 0.0);

    for (std::size_t ti = steps; ti-- > 0;) {
        const StepCache& cur = caches[ti];
        const std::vector<double>& h_prev = (ti == 0) ? zero : caches[ti - 1].h;
        const double x = inputs[ti];
        const double dy = 2.0 * (ys[ti] - targets[ti]) * inv_n;

        grad.b_out += dy;
        std::vector<double> dh(n);
        for (std::size_t i = 0; i < n; ++i) {
            grad.w_out[i] += dy * cur.h[i];
            dh[i] = dy * params.w_out[i] + dh_next[i];
        }

        switch (params.kind) {
        case CellKind::VanillaRnn: {
            std::vector<double> da(n);
            for (std::size_t i = 0; i < n; ++i) {
                da[i] = dh[i] * (1.0 - cur.h[i] * cur.h[i]);
            }
            accumulate_block(grad.gates[0], da, x, h_prev);
            std::fill(dh_next.begin(), dh_next.end(), 0.0);
            matvec_t_add(params.gates[0].w_rec, da, dh_next);
            break;
        }
        case CellKind::Lstm: {
            const std::vector<double>& c_prev =
                (ti == 0) ? zero : caches[ti - 1].c;
            std::vector<double> da_i(n), da_f(n), da_g(n), da_o(n), dc(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double dov = dh[i] * cur.tc[i];
                da_o[i] = dov * cur.o[i] * (1.0 - cur.o[i]);
                dc[i] = dh[i] * cur.o[i] * (1.0 - cur.tc[i] * cur.tc[i]) +
                        dc_next[i];
                const double div = dc[i] * cur.g[i];
                da_i[i] = div * cur.i[i] * (1.0 - cur.i[i]);
                const double dfv = dc[i] * c_prev[i];
                da_f[i] = dfv * cur.f[i] * (1.0 - cur.f[i]);
                const double dgv = dc[i] * cur.i[i];
                da_g[i] = dgv * (1.0 - cur.g[i] * cur.g[i]);
                dc_next[i] = dc[i] * cur.f[i];
            }
            accumulate_block(grad.gates[0], da_i, x, h_prev);
            accumulate_block(grad.gates[1], da_f, x, h_prev);
            accumulate_block(grad.gates[2], da_g, x, h_prev);
            accumulate_block(grad.gates[3], da_o, x, h_prev);
            std::fill(dh_next.begin(), dh_next.end(), 0.0);
            matvec_t_add(params.gates[0].w_rec, da_i, dh_next);
            matvec_t_add(params.gates[1].w_rec, da_f, dh_next);
            matvec_t_add(params.gates[2].w_rec, da_g, dh_next);
            matvec_t_add(params.gates[3].w_rec, da_o, dh_next);
            break;
        }
        case CellKind::Gru: {
            std::vector<double> da_z(n), da_r(n), da_n(n), drh(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double dz = dh[i] * (h_prev[i] - cur.n[i]);
                da_z[i] = dz * cur.z[i] * (1.0 - cur.z[i]);
                const double dn = dh[i] * (1.0 - cur.z[i]);
                da_n[i] = dn * (1.0 - cur.n[i] * cur.n[i]);
            }
            matvec_t_add(params.gates[2].w_rec, da_n, drh);
            for (std::size_t i = 0; i < n; ++i) {
                const double dr = drh[i] * h_prev[i];
                da_r[i] = dr * cur.r[i] * (1.0 - cur.r[i]);
            }
            accumulate_block(grad.gates[0], da_z, x, h_prev);
            accumulate_block(grad.gates[1], da_r, x, h_prev);
            accumulate_block(grad.gates[2], da_n, x, cur.rh);
            for (std::size_t i = 0; i < n; ++i) {
                dh_next[i] = dh[i] * cur.z[i] + drh[i] * cur.r[i];
            }
            matvec_t_add(params.gates[0].w_rec, da_z, dh_next);
            matvec_t_add(params.gates[1].w_rec, da_r, dh_next);
            break;
        }
        }
    }
    return grad;
}

TrainedModel train_window(CellKind kind, std::span<const double> window,
                          const TrainingConfig& cfg) {
    if (window.size() < 2) {
        throw InvalidConfigError("training window needs at least 2 points");
    }
    if (cfg.epochs < 1 || cfg.learning_rate <= 0.0) {
        throw InvalidConfigError("epochs and learning rate must be positive");
    }
    check_finite(window, "training window");

    WindowNormalizer norm = WindowNormalizer::fit(window);
    std::vector<double> xs(window.size());
    for (std::size_t i = 0; i < window.size(); ++i) {
        xs[i] = norm.normalize(window[i]);
    }
    std::span<const double> inputs(xs.data(), xs.size() - 1);
    std::span<const double> targets(xs.data() + 1, xs.size() - 1);

    CellParameters p = init_parameters(kind, cfg.hidden_dim, cfg.seed);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        CellGradients g = gradients(p, inputs, targets);
        apply_gradient_step(p, g, cfg.learning_rate);
    }
    return TrainedModel{std::move(p), norm};
}

double predict_next(const CellParameters& params, const WindowNormalizer& norm,
                    std::span<const double> window) {
    if (window.empty()) throw std::invalid_argument("predict_next: empty window");
    check_finite(window, "prediction window");
    std::vector<double> xs(window.size());
    for (std::size_t i = 0; i < window.size(); ++i) {
        xs[i] = norm.normalize(window[i]);
    }
    auto r = run_forward(params, xs, nullptr, nullptr, nullptr);
    return norm.denormalize(r.back());
}

}  // namespace repad
