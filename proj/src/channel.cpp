#include "noisyauth/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "noisyauth/lp.hpp"

namespace noisyauth {

void validate_distribution(const Distribution& p) {
    if (p.empty()) throw std::invalid_argument("distribution: empty");
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0 && v <= 1.0 + kProbTol))
            throw std::invalid_argument("distribution: entry outside [0,1]");
        sum += v;
    }
    if (std::fabs(sum - 1.0) > kProbTol)
        throw std::invalid_argument("distribution: entries do not sum to 1");
}

void Dmc::validate() const {
    if (input_size == 0 || output_size == 0)
        throw std::invalid_argument("dmc: empty alphabet");
    if (rows.size() != input_size)
        throw std::invalid_argument("dmc: row count does not match input alphabet");
    for (const auto& r : rows) {
        if (r.size() != output_size)
            throw std::invalid_argument("dmc: row width does not match output alphabet");
        validate_distribution(r);
    }
}

const Distribution& Dmc::row(Symbol x) const {
    if (x >= input_size) throw std::invalid_argument("dmc: input symbol out of alphabet");
    return rows[x];
}

Dmc Dmc::bsc(double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("bsc: p outside [0,1]");
    return Dmc{2, 2, {{1.0 - p, p}, {p, 1.0 - p}}};
}

Dmc Dmc::identity(std::size_t size) {
    Dmc w{size, size, {}};
    w.rows.assign(size, Distribution(size, 0.0));
    for (std::size_t i = 0; i < size; ++i) w.rows[i][i] = 1.0;
    return w;
}

Dmc Dmc::from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Dmc w;
    w.input_size = j.at("input_size").get<std::size_t>();
    w.output_size = j.at("output_size").get<std::size_t>();
    w.rows = j.at("rows").get<std::vector<Distribution>>();
    w.validate();
    return w;
}

Dmc Dmc::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open channel file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string Dmc::to_json_text() const {
    nlohmann::json j;
    j["input_size"] = input_size;
    j["output_size"] = output_size;
    j["rows"] = rows;
    return j.dump();
}

Distribution EmpiricalType::frequencies() const {
    Distribution f(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        f[i] = static_cast<double>(counts[i]) / static_cast<double>(length);
    return f;
}

EmpiricalType empirical_type(std::span<const Symbol> z, std::size_t alphabet_size) {
    if (z.empty()) throw std::invalid_argument("empirical_type: empty sequence");
    EmpiricalType t;
    t.counts.assign(alphabet_size, 0);
    t.length = z.size();
    for (Symbol u : z) {
        if (u >= alphabet_size)
            throw std::invalid_argument("empirical_type: symbol out of alphabet");
        ++t.counts[u];
    }
    return t;
}

double statistical_distance(const Distribution& p, const Distribution& q) {
    if (p.size() != q.size())
        throw std::invalid_argument("statistical_distance: alphabet mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - q[i]);
    return s;
}

HullDistanceResult hull_distance(const Distribution& p,
                                 const std::vector<Distribution>& rows) {
    if (rows.empty()) throw std::invalid_argument("hull_distance: empty row set");
    const std::size_t q = p.size();
    const std::size_t m = rows.size();
    for (const auto& r : rows) {
        if (r.size() != q)
            throw std::invalid_argument("hull_distance: alphabet mismatch");
    }

    // Variables: lambda_1..m, e+_1..q, e-_1..q.
    // sum_i lambda_i W(u|i) + e+_u - e-_u = P(u) for each u; sum lambda = 1.
    // Minimize sum (e+ + e-). Signed residuals are split so that the
    // objective equals the total-variation sum exactly at the optimum.
    const std::size_t nvars = m + 2 * q;
    std::vector<std::vector<double>> a(q + 1, std::vector<double>(nvars, 0.0));
    std::vector<double> b(q + 1, 0.0);
    std::vector<double> c(nvars, 0.0);
    for (std::size_t u = 0; u < q; ++u) {
        for (std::size_t i = 0; i < m; ++i) a[u][i] = rows[i][u];
        a[u][m + u] = 1.0;
        a[u][m + q + u] = -1.0;
        b[u] = p[u];
        c[m + u] = 1.0;
        c[m + q + u] = 1.0;
    }
    for (std::size_t i = 0; i < m; ++i) a[q][i] = 1.0;
    b[q] = 1.0;

    LpResult lp = simplex_solve(a, b, c);
    if (lp.status != LpStatus::Optimal)
        throw std::runtime_error("hull_distance: LP did not reach optimality");

    HullDistanceResult res;
    res.distance = std::max(0.0, lp.objective);
    res.weights.assign(lp.x.begin(), lp.x.begin() + m);
    // Clean tiny negative noise from the solver.
    double wsum = 0.0;
    for (double& w : res.weights) {
        if (w < 0.0) w = 0.0;
        wsum += w;
    }
    for (double& w : res.weights) w /= wsum;
    return res;
}

double theta(const Dmc& w) {
    w.validate();
    if (w.input_size < 2) throw std::invalid_argument("theta: needs >= 2 input rows");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < w.input_size; ++i) {
        std::vector<Distribution> others;
        others.reserve(w.input_size - 1);
        for (std::size_t k = 0; k < w.input_size; ++k) {
            if (k != i) others.push_back(w.rows[k]);
        }
        best = std::min(best, hull_distance(w.rows[i], others).distance);
    }
    return best;
}

bool is_nonredundant(const Dmc& w) { return theta(w) > 1e-9; }

Sequence sample(const Dmc& w, std::span<const Symbol> x, RngStream& rng) {
    Sequence y;
    y.reserve(x.size());
    for (Symbol xi : x) {
        const Distribution& r = w.row(xi);
        double u = rng.uniform();
        double acc = 0.0;
        Symbol out = static_cast<Symbol>(w.output_size - 1);
        for (std::size_t b = 0; b < r.size(); ++b) {
            acc += r[b];
            if (u < acc) {
                out = static_cast<Symbol>(b);
                break;
            }
        }
        y.push_back(out);
    }
    return y;
}

bool is_typical(std::span<const Symbol> z, const Distribution& p, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("is_typical: eps must be positive");
    EmpiricalType t = empirical_type(z, p.size());
    const double radius = eps / static_cast<double>(p.size());
    for (std::size_t u = 0; u < p.size(); ++u) {
        double freq = static_cast<double>(t.counts[u]) / static_cast<double>(t.length);
        if (p[u] == 0.0 && t.counts[u] != 0) return false;
        // Boundary tolerance: a deviation of exactly radius must pass
        // even when the frequencies are not exactly representable.
        if (std::fabs(freq - p[u]) > radius + 1e-9) return false;
    }
    return true;
}

bool is_cond_typical(std::span<const Symbol> y, std::span<const Symbol> x,
                     const Dmc& w, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("is_cond_typical: eps must be positive");
    if (y.size() != x.size())
        throw std::invalid_argument("is_cond_typical: length mismatch");
    const std::size_t nx = w.input_size;
    const std::size_t ny = w.output_size;
    std::vector<std::uint64_t> joint(nx * ny, 0);
    std::vector<std::uint64_t> marg(nx, 0);
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] >= nx || y[i] >= ny)
            throw std::invalid_argument("is_cond_typical: symbol out of alphabet");
        ++joint[x[i] * ny + y[i]];
        ++marg[x[i]];
    }
    const double radius = eps / (static_cast<double>(nx) * static_cast<double>(ny));
    for (std::size_t a = 0; a < nx; ++a) {
        for (std::size_t b = 0; b < ny; ++b) {
            double tj = static_cast<double>(joint[a * ny + b]) / n;
            double target = (static_cast<double>(marg[a]) / n) * w.rows[a][b];
            if (target == 0.0 && tj != 0.0) return false;
            if (std::fabs(tj - target) > radius + 1e-9) return false;
        }
    }
    return true;
}

CapacityResult capacity(const Dmc& w, double tol) {
    w.validate();
    if (tol <= 0.0) throw std::invalid_argument("capacity: tol must be positive");
    const std::size_t p = w.input_size;
    const std::size_t q = w.output_size;
    Distribution r(p, 1.0 / static_cast<double>(p));
    std::vector<double> d(p, 0.0);  // per-input divergence term, nats
    double cap_nats = 0.0;
    const std::size_t max_iter = 100000;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        // Output marginal under r.
        Distribution out(q, 0.0);
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j < q; ++j) out[j] += r[i] * w.rows[i][j];
        }
        double lo = 0.0;  // sum r_i d_i: lower bound on C
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < p; ++i) {
            double di = 0.0;
            for (std::size_t j = 0; j < q; ++j) {
                double wv = w.rows[i][j];
                if (wv > 0.0) di += wv * std::log(wv / out[j]);
            }
            d[i] = di;
            lo += r[i] * di;
            hi = std::max(hi, di);
        }
        cap_nats = lo;
        if (hi - lo < tol * std::log(2.0)) break;
        double norm = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            r[i] *= std::exp(d[i] - hi);
            norm += r[i];
        }
        for (double& v : r) v /= norm;
    }
    return {std::max(0.0, cap_nats / std::log(2.0)), r};
}

double binary_entropy(double alpha) {
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("binary_entropy: alpha outside [0,1]");
    double h = 0.0;
    if (alpha > 0.0) h -= alpha * std::log2(alpha);
    if (alpha < 1.0) h -= (1.0 - alpha) * std::log2(1.0 - alpha);
    return h;
}

double entropy(const Distribution& p) {
    validate_distribution(p);
    double h = 0.0;
    for (double v : p) {
        if (v > 0.0) h -= v * std::log2(v);
    }
    return h;
}

double channel_gamma(const Dmc& w1, Symbol a, const Dmc& w2) {
    if (w1.output_size != w2.output_size)
        throw std::invalid_argument("gamma: output alphabet mismatch");
    return hull_distance(w1.row(a), w2.rows).distance;
}

AnchorChoice choose_anchor(const Dmc& w1, const Dmc& w2) {
    if (w1.output_size != w2.output_size)
        throw std::invalid_argument("choose_anchor: output alphabet mismatch");
    AnchorChoice best;
    best.gamma = -1.0;
    for (Symbol a = 0; a < w1.input_size; ++a) {
        HullDistanceResult h = hull_distance(w1.row(a), w2.rows);
        if (h.distance > best.gamma) {
            best = {a, h.distance, h.weights};
        }
    }
    if (best.gamma <= 1e-9)
        throw std::runtime_error(
            "choose_anchor: Cov(W1) is contained in Cov(W2); authentication infeasible");
    return best;
}

double typicality_failure_bound(std::size_t alphabet_size, std::uint64_t n, double eps) {
    double per = eps / static_cast<double>(alphabet_size);
    return 2.0 * static_cast<double>(alphabet_size) *
           std::exp(-2.0 * static_cast<double>(n) * per * per);
}

double output_concentration_hull_bound(std::size_t output_size, double eps1,
                                       double eps2, std::uint64_t n) {
    double z = static_cast<double>(output_size);
    return z * eps1 + z * std::sqrt(std::log(2.0 / eps2) / (2.0 * static_cast<double>(n)));
}

double cross_typicality_bound(const Dmc& w, double alpha, double eps, std::uint64_t n) {
    double th = theta(w);
    double num = alpha * th - eps;
    if (num <= 0.0) return 1.0;
    double den = static_cast<double>(w.input_size * w.input_size) *
                 static_cast<double>(w.output_size * w.output_size);
    return std::exp2(-2.0 * static_cast<double>(n) * num * num / den);
}

}  // namespace noisyauth
