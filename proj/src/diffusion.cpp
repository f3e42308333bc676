#include "pqc/diffusion.hpp"
#include "pqc/errors.hpp"

#include <cmath>
#include <cstdlib>

namespace pqc {

void InpaintProblem::validate() const {
    if (image.width != mask.width || image.height != mask.height)
        throw DimensionError("image and mask dimensions differ");
    long known = mask.count_known();
    if (known == 0)
        throw ConfigError("mask has no known pixels");
    if (known == static_cast<long>(mask.size()))
        throw ConfigError("mask has no unknown pixels");
    if (tolerance <= 0.0)
        throw ConfigError("tolerance must be positive");
}

namespace {

// Sparse symmetric positive definite system on the unknown pixels after
// eliminating the Dirichlet rows. Matrix-free 5-point stencil application;
// the Neumann outer boundary drops out-of-domain neighbours from the stencil.
struct UnknownSystem {
    int width, height;
    std::vector<long> eq_of_pixel;  // -1 for known pixels
    std::vector<long> pixel_of_eq;
    long n_unknown = 0;

    explicit UnknownSystem(const Mask& mask)
        : width(mask.width), height(mask.height),
          eq_of_pixel(mask.size(), -1) {
        for (size_t i = 0; i < mask.size(); ++i) {
            if (!mask.known[i]) {
                eq_of_pixel[i] = n_unknown++;
                pixel_of_eq.push_back(static_cast<long>(i));
            }
        }
    }

    template <typename NeighbourFn>
    void for_neighbours(long pix, NeighbourFn&& fn) const {
        long x = pix % width, y = pix / width;
        if (x > 0) fn(pix - 1);
        if (x < width - 1) fn(pix + 1);
        if (y > 0) fn(pix - width);
        if (y < height - 1) fn(pix + width);
    }

    // y = A x where A is the eliminated Laplacian (diagonal = in-domain
    // neighbour count, off-diagonal -1 towards unknown neighbours).
    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        for (long e = 0; e < n_unknown; ++e) {
            long pix = pixel_of_eq[e];
            double acc = 0.0;
            int degree = 0;
            for_neighbours(pix, [&](long q) {
                ++degree;
                long eq = eq_of_pixel[q];
                if (eq >= 0) acc -= x[eq];
            });
            y[e] = degree * x[e] + acc;
        }
    }

    // b collects the Dirichlet data of known neighbours.
    std::vector<double> rhs(const ImageGrid& f, const Mask& mask) const {
        std::vector<double> b(n_unknown, 0.0);
        for (long e = 0; e < n_unknown; ++e) {
            long pix = pixel_of_eq[e];
            double acc = 0.0;
            for_neighbours(pix, [&](long q) {
                if (mask.known[q]) acc += f.values[q];
            });
            b[e] = acc;
        }
        return b;
    }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Conjugate gradients on the SPD eliminated system.
std::vector<double> cg_solve(const UnknownSystem& sys, const std::vector<double>& b,
                             double tolerance, long max_iterations) {
    long n = sys.n_unknown;
    std::vector<double> x(n, 0.0), r = b, p = b, Ap(n);
    double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) return x;
    double rr = dot(r, r);
    double target = tolerance * bnorm;
    for (long it = 0; it < max_iterations; ++it) {
        if (std::sqrt(rr) <= target) return x;
        sys.apply(p, Ap);
        double alpha = rr / dot(p, Ap);
        for (long i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        double rr_new = dot(r, r);
        double beta = rr_new / rr;
        rr = rr_new;
        for (long i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    if (std::sqrt(rr) <= target) return x;
    throw SolverError("conjugate gradients did not converge", std::sqrt(rr) / bnorm);
}

ImageGrid solve_with_system(const UnknownSystem& sys, const ImageGrid& f,
                            const Mask& mask, double tolerance, long max_iterations) {
    std::vector<double> b = sys.rhs(f, mask);
    long maxit = max_iterations > 0 ? max_iterations
                                    : 50 * static_cast<long>(mask.size());
    std::vector<double> x = cg_solve(sys, b, tolerance, maxit);
    ImageGrid u = f;
    for (long e = 0; e < sys.n_unknown; ++e)
        u.values[sys.pixel_of_eq[e]] = x[e];
    return u;
}

} // namespace

ImageGrid solve(const InpaintProblem& problem) {
    problem.validate();
    UnknownSystem sys(problem.mask);
    return solve_with_system(sys, problem.image, problem.mask,
                             problem.tolerance, problem.max_iterations);
}

ImageGrid InfluenceBasis::combine(const std::vector<double>& g) const {
    if (g.size() != fields.size())
        throw DimensionError("coefficient count does not match basis size");
    ImageGrid out = ImageGrid::constant(width, height, 0.0);
    for (size_t i = 0; i < fields.size(); ++i) {
        double gi = g[i];
        if (gi == 0.0) continue;
        const auto& f = fields[i].values;
        for (size_t p = 0; p < out.size(); ++p) out.values[p] += gi * f[p];
    }
    return out;
}

InfluenceBasis influence_basis(const Mask& mask, double tolerance,
                               long max_iterations, long long entry_budget) {
    long known = mask.count_known();
    if (known == 0 || known == static_cast<long>(mask.size()))
        throw ConfigError("mask must have both known and unknown pixels");
    long long entries = static_cast<long long>(known) * static_cast<long long>(mask.size());
    if (entries > entry_budget)
        throw BudgetError("influence basis would need " + std::to_string(entries) +
                          " entries, budget is " + std::to_string(entry_budget));

    InfluenceBasis basis;
    basis.width = mask.width;
    basis.height = mask.height;
    basis.pixel_indices = mask.known_indices();
    basis.fields.reserve(basis.pixel_indices.size());

    UnknownSystem sys(mask);
    ImageGrid impulse = ImageGrid::constant(mask.width, mask.height, 0.0);
    for (long pix : basis.pixel_indices) {
        impulse.values[pix] = 1.0;
        basis.fields.push_back(
            solve_with_system(sys, impulse, mask, tolerance, max_iterations));
        impulse.values[pix] = 0.0;
    }
    return basis;
}

} // namespace pqc
