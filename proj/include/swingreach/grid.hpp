#pragma once

#include <cstddef>
#include <vector>

#include "swingreach/types.hpp"

namespace swingreach {

/// Uniform 2-D node grid over the (delta, omega) plane.
///
/// Nodes include both endpoints of each axis: node (i, j) sits at
/// (delta_min + i*h_delta, omega_min + j*h_omega).
struct GridSpec {
    double delta_min = 0.0;
    double delta_max = 1.0;
    double omega_min = 0.0;
    double omega_max = 1.0;
    int n_delta = 3;
    int n_omega = 3;

    /// Throws std::invalid_argument on empty axes or node counts < 3.
    void validate() const;

    double h_delta() const { return (delta_max - delta_min) / (n_delta - 1); }
    double h_omega() const { return (omega_max - omega_min) / (n_omega - 1); }
    double h_max() const { return h_delta() > h_omega() ? h_delta() : h_omega(); }

    double delta_at(int i) const { return delta_min + i * h_delta(); }
    double omega_at(int j) const { return omega_min + j * h_omega(); }
    State node(int i, int j) const { return {delta_at(i), omega_at(j)}; }

    bool contains(const State& p) const {
        return p.delta >= delta_min && p.delta <= delta_max &&
               p.omega >= omega_min && p.omega <= omega_max;
    }

    std::size_t node_count() const {
        return static_cast<std::size_t>(n_delta) * static_cast<std::size_t>(n_omega);
    }

    bool operator==(const GridSpec&) const = default;
};

/// Node values of a scalar function on a GridSpec.
///
/// Storage is delta-major: values[i * n_omega + j] is the node at
/// delta index i, omega index j. This ordering is also the row order
/// of the CSV dump (one row per delta index).
class ScalarField {
public:
    ScalarField(GridSpec spec, double fill);
    ScalarField(GridSpec spec, std::vector<double> values);

    const GridSpec& spec() const { return spec_; }

    double at(int i, int j) const { return values_[index(i, j)]; }
    double& at(int i, int j) { return values_[index(i, j)]; }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * spec_.n_omega + j;
    }

    double max_value() const;
    double min_value() const;

    bool operator==(const ScalarField&) const = default;

private:
    GridSpec spec_;
    std::vector<double> values_;
};

/// Polylines tracing the zero level set of a field. Each polyline is a
/// sequence of (delta, omega) vertices; closed loops repeat the first
/// vertex at the end.
struct Contour {
    std::vector<std::vector<State>> polylines;

    bool empty() const { return polylines.empty(); }
    std::size_t vertex_count() const;
};

// Point evaluators behind the field constructors. Sign convention
// throughout: positive inside the set, zero on the boundary.

/// Exact Euclidean signed distance to the boundary of an axis-aligned
/// rectangle, positive inside.
double rect_signed_distance(const State& p, double delta_lo, double delta_hi,
                            double omega_lo, double omega_hi);

/// Approximate signed distance to an axis-aligned ellipse: r*(1 - rho)
/// with rho the normalized elliptical radius and r the geometric mean
/// of the radii. Exact only for circles along radial directions; the
/// zero level set and the sign are exact for any radii.
double ellipse_signed_distance(const State& p, const State& center,
                               double radius_delta, double radius_omega);

ScalarField make_field(const GridSpec& spec, double fill);

ScalarField signed_distance_rect(const GridSpec& spec, double delta_lo, double delta_hi,
                                 double omega_lo, double omega_hi);

ScalarField signed_distance_ellipse(const GridSpec& spec, const State& center,
                                    double radius_delta, double radius_omega);

struct GradientField {
    ScalarField d_delta;
    ScalarField d_omega;
};

/// Central differences at interior nodes, one-sided at boundary nodes.
GradientField gradient_central(const ScalarField& field);

/// Bilinear interpolation; exact at nodes and for affine fields.
/// Throws std::domain_error for points outside the grid box.
double interpolate(const ScalarField& field, const State& p);

/// Marching-squares zero contour with linear edge interpolation,
/// stitched into polylines. Empty when the field has uniform sign.
Contour extract_zero_contour(const ScalarField& field);

/// Elementwise min; level-set intersection of two sets.
/// Throws std::invalid_argument on mismatched specs.
ScalarField pointwise_min(const ScalarField& a, const ScalarField& b);

/// Elementwise negation; level-set complement.
ScalarField pointwise_neg(const ScalarField& a);

}  // namespace swingreach
