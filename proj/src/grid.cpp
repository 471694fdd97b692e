#include "swingreach/grid.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <deque>
#include <stdexcept>
#include <unordered_map>

namespace swingreach {

void GridSpec::validate() const {
    if (!(std::isfinite(delta_min) && std::isfinite(delta_max) &&
          std::isfinite(omega_min) && std::isfinite(omega_max))) {
        throw std::invalid_argument("GridSpec: bounds must be finite");
    }
    if (!(delta_min < delta_max) || !(omega_min < omega_max)) {
        throw std::invalid_argument("GridSpec: min must be strictly below max on both axes");
    }
    if (n_delta < 3 || n_omega < 3) {
        throw std::invalid_argument("GridSpec: need at least 3 nodes per axis");
    }
}

ScalarField::ScalarField(GridSpec spec, double fill) : spec_(spec) {
    spec_.validate();
    if (!std::isfinite(fill)) {
        throw std::invalid_argument("ScalarField: fill value must be finite");
    }
    values_.assign(spec_.node_count(), fill);
}

ScalarField::ScalarField(GridSpec spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
    spec_.validate();
    if (values_.size() != spec_.node_count()) {
        throw std::invalid_argument("ScalarField: value count does not match grid");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("ScalarField: all node values must be finite");
        }
    }
}

double ScalarField::max_value() const {
    return *std::max_element(values_.begin(), values_.end());
}

double ScalarField::min_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

std::size_t Contour::vertex_count() const {
    std::size_t n = 0;
    for (const auto& line : polylines) n += line.size();
    return n;
}

double rect_signed_distance(const State& p, double delta_lo, double delta_hi,
                            double omega_lo, double omega_hi) {
    if (!(delta_lo < delta_hi) || !(omega_lo < omega_hi)) {
        throw std::invalid_argument("rect_signed_distance: degenerate rectangle");
    }
    const double qd = std::abs(p.delta - 0.5 * (delta_lo + delta_hi)) - 0.5 * (delta_hi - delta_lo);
    const double qw = std::abs(p.omega - 0.5 * (omega_lo + omega_hi)) - 0.5 * (omega_hi - omega_lo);
    if (qd > 0.0 || qw > 0.0) {
        return -std::hypot(std::max(qd, 0.0), std::max(qw, 0.0));
    }
    return -std::max(qd, qw);
}

double ellipse_signed_distance(const State& p, const State& center,
                               double radius_delta, double radius_omega) {
    if (!(radius_delta > 0.0) || !(radius_omega > 0.0)) {
        throw std::invalid_argument("ellipse_signed_distance: radii must be positive");
    }
    const double rho = std::hypot((p.delta - center.delta) / radius_delta,
                                  (p.omega - center.omega) / radius_omega);
    return std::sqrt(radius_delta * radius_omega) * (1.0 - rho);
}

ScalarField make_field(const GridSpec& spec, double fill) {
    return ScalarField(spec, fill);
}

namespace {

template <typename F>
ScalarField map_nodes(const GridSpec& spec, F f) {
    spec.validate();
    std::vector<double> values(spec.node_count());
    for (int i = 0; i < spec.n_delta; ++i) {
        for (int j = 0; j < spec.n_omega; ++j) {
            values[static_cast<std::size_t>(i) * spec.n_omega + j] = f(spec.node(i, j));
        }
    }
    return ScalarField(spec, std::move(values));
}

}  // namespace

ScalarField signed_distance_rect(const GridSpec& spec, double delta_lo, double delta_hi,
                                 double omega_lo, double omega_hi) {
    return map_nodes(spec, [&](const State& p) {
        return rect_signed_distance(p, delta_lo, delta_hi, omega_lo, omega_hi);
    });
}

ScalarField signed_distance_ellipse(const GridSpec& spec, const State& center,
                                    double radius_delta, double radius_omega) {
    return map_nodes(spec, [&](const State& p) {
        return ellipse_signed_distance(p, center, radius_delta, radius_omega);
    });
}

GradientField gradient_central(const ScalarField& field) {
    const GridSpec& g = field.spec();
    ScalarField dd(g, 0.0), dw(g, 0.0);
    const double hd = g.h_delta(), hw = g.h_omega();
    for (int i = 0; i < g.n_delta; ++i) {
        for (int j = 0; j < g.n_omega; ++j) {
            if (i == 0) {
                dd.at(i, j) = (field.at(1, j) - field.at(0, j)) / hd;
            } else if (i == g.n_delta - 1) {
                dd.at(i, j) = (field.at(i, j) - field.at(i - 1, j)) / hd;
            } else {
                dd.at(i, j) = (field.at(i + 1, j) - field.at(i - 1, j)) / (2.0 * hd);
            }
            if (j == 0) {
                dw.at(i, j) = (field.at(i, 1) - field.at(i, 0)) / hw;
            } else if (j == g.n_omega - 1) {
                dw.at(i, j) = (field.at(i, j) - field.at(i, j - 1)) / hw;
            } else {
                dw.at(i, j) = (field.at(i, j + 1) - field.at(i, j - 1)) / (2.0 * hw);
            }
        }
    }
    return {std::move(dd), std::move(dw)};
}

double interpolate(const ScalarField& field, const State& p) {
    const GridSpec& g = field.spec();
    if (!g.contains(p)) {
        throw std::domain_error("interpolate: point outside grid bounds");
    }
    double fx = (p.delta - g.delta_min) / g.h_delta();
    double fy = (p.omega - g.omega_min) / g.h_omega();
    int i = std::clamp(static_cast<int>(fx), 0, g.n_delta - 2);
    int j = std::clamp(static_cast<int>(fy), 0, g.n_omega - 2);
    const double u = fx - i;
    const double v = fy - j;
    return (1.0 - u) * (1.0 - v) * field.at(i, j) + u * (1.0 - v) * field.at(i + 1, j) +
           (1.0 - u) * v * field.at(i, j + 1) + u * v * field.at(i + 1, j + 1);
}

namespace {

struct Segment {
    State p0;
    State p1;
};

// Crossing parameter along an edge whose endpoint values straddle zero.
double edge_t(double v0, double v1) { return v0 / (v0 - v1); }

uint64_t bits_of(double x) {
    uint64_t b;
    std::memcpy(&b, &x, sizeof b);
    return b;
}

struct PointKey {
    uint64_t d, w;
    bool operator==(const PointKey&) const = default;
};

struct PointKeyHash {
    std::size_t operator()(const PointKey& k) const {
        return std::hash<uint64_t>{}(k.d * 1000003u ^ k.w);
    }
};

PointKey key_of(const State& p) { return {bits_of(p.delta), bits_of(p.omega)}; }

}  // namespace

Contour extract_zero_contour(const ScalarField& field) {
    const GridSpec& g = field.spec();
    const double hd = g.h_delta(), hw = g.h_omega();
    std::vector<Segment> segs;

    // Cell corners, cell-local: a=(0,0) b=(1,0) c=(1,1) d=(0,1) in
    // (delta, omega). Segments are oriented with the nonnegative
    // region on the left, so shared crossing points chain head to
    // tail across cells.
    for (int i = 0; i + 1 < g.n_delta; ++i) {
        const double x0 = g.delta_at(i);
        for (int j = 0; j + 1 < g.n_omega; ++j) {
            const double y0 = g.omega_at(j);
            const double y1 = g.omega_at(j + 1);
            const double a = field.at(i, j);
            const double b = field.at(i + 1, j);
            const double c = field.at(i + 1, j + 1);
            const double d = field.at(i, j + 1);
            const int idx = (a >= 0.0 ? 1 : 0) | (b >= 0.0 ? 2 : 0) |
                            (c >= 0.0 ? 4 : 0) | (d >= 0.0 ? 8 : 0);
            if (idx == 0 || idx == 15) continue;

            auto bottom = [&] { return State{x0 + edge_t(a, b) * hd, y0}; };
            auto right = [&] { return State{g.delta_at(i + 1), y0 + edge_t(b, c) * hw}; };
            auto top = [&] { return State{x0 + edge_t(d, c) * hd, y1}; };
            auto left = [&] { return State{x0, y0 + edge_t(a, d) * hw}; };

            auto emit = [&](State p0, State p1) {
                if (!(p0 == p1)) segs.push_back({p0, p1});
            };

            switch (idx) {
                case 1: emit(bottom(), left()); break;
                case 2: emit(right(), bottom()); break;
                case 3: emit(right(), left()); break;
                case 4: emit(top(), right()); break;
                case 5: emit(bottom(), left()); emit(top(), right()); break;
                case 6: emit(top(), bottom()); break;
                case 7: emit(top(), left()); break;
                case 8: emit(left(), top()); break;
                case 9: emit(bottom(), top()); break;
                case 10: emit(right(), bottom()); emit(left(), top()); break;
                case 11: emit(right(), top()); break;
                case 12: emit(left(), right()); break;
                case 13: emit(bottom(), right()); break;
                case 14: emit(left(), bottom()); break;
                default: break;
            }
        }
    }

    // Stitch segments into polylines via exact endpoint matching; the
    // shared crossing of two adjacent cells is computed from the same
    // node values, so coordinates match bit for bit.
    std::unordered_multimap<PointKey, std::size_t, PointKeyHash> by_start, by_end;
    for (std::size_t s = 0; s < segs.size(); ++s) {
        by_start.emplace(key_of(segs[s].p0), s);
        by_end.emplace(key_of(segs[s].p1), s);
    }
    std::vector<bool> used(segs.size(), false);

    auto take = [&](const auto& index, const State& p) -> std::size_t {
        auto [lo, hi] = index.equal_range(key_of(p));
        for (auto it = lo; it != hi; ++it) {
            if (!used[it->second]) return it->second;
        }
        return segs.size();
    };

    Contour contour;
    for (std::size_t s = 0; s < segs.size(); ++s) {
        if (used[s]) continue;
        std::deque<State> line{segs[s].p0, segs[s].p1};
        used[s] = true;
        // Extend forward until the chain closes or dead-ends.
        while (!(line.back() == line.front())) {
            std::size_t next = take(by_start, line.back());
            if (next >= segs.size()) break;
            used[next] = true;
            line.push_back(segs[next].p1);
        }
        // Extend backward unless closed.
        while (!(line.back() == line.front())) {
            std::size_t prev = take(by_end, line.front());
            if (prev >= segs.size()) break;
            used[prev] = true;
            line.push_front(segs[prev].p0);
        }
        contour.polylines.emplace_back(line.begin(), line.end());
    }
    return contour;
}

ScalarField pointwise_min(const ScalarField& a, const ScalarField& b) {
    if (!(a.spec() == b.spec())) {
        throw std::invalid_argument("pointwise_min: grid specs do not match");
    }
    std::vector<double> out(a.values().size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = std::min(a.values()[k], b.values()[k]);
    }
    return ScalarField(a.spec(), std::move(out));
}

ScalarField pointwise_neg(const ScalarField& a) {
    std::vector<double> out(a.values().size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = -a.values()[k];
    return ScalarField(a.spec(), std::move(out));
}

}  // namespace swingreach
