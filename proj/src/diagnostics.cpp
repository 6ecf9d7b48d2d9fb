#include "edgelab/diagnostics.hpp"

#include "edgelab/errors.hpp"
#include "edgelab/indices.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>

namespace edgelab {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = double(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxx > 0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy > 0 && sxx > 0 ? sxy * sxy / (sxx * syy) : 1.0;
    return f;
}

// angle in [0, 2 pi), with values within 1e-9 of a full turn sent to 0
double circle_angle(cplx z) {
    double t = std::arg(z);
    if (t < 0.0)
        t += two_pi;
    if (t > two_pi - 1e-9)
        t = 0.0;
    return t;
}

struct SchurSpectrum {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;
};

SchurSpectrum schur_spectrum(const Eigen::MatrixXcd& b) {
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(b, true);
    if (schur.info() != Eigen::Success)
        throw NumericalContractError("schur_failed", "complex Schur factorization failed");
    // for a normal matrix the triangular factor is diagonal and Q holds eigenvectors
    return {schur.matrixT().diagonal(), schur.matrixU()};
}

// greedy nearest matching of two multisets of equal size
double multiset_deviation(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size())
        return std::numeric_limits<double>::infinity();
    std::vector<bool> used(b.size(), false);
    double worst = 0.0;
    for (const cplx& z : a) {
        std::size_t best = b.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (used[j])
                continue;
            const double d = std::abs(z - b[j]);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        used[best] = true;
        worst = std::max(worst, best_d);
    }
    return worst;
}

Eigen::VectorXcd random_unit_state(Index n, UniformStream& rng) {
    Eigen::VectorXcd v(n);
    for (Index i = 0; i < n; ++i)
        v(i) = cplx(rng.symmetric(1.0), rng.symmetric(1.0));
    return v / v.norm();
}

} // namespace

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

DecayFitReport fit_decay(std::vector<std::pair<double, double>> pairs) {
    std::sort(pairs.begin(), pairs.end());
    DecayFitReport r;
    r.pairs = pairs;
    double top = 0.0;
    for (const auto& p : pairs)
        top = std::max(top, p.second);
    if (top == 0.0) {
        r.zero = true;
        r.strictly_local = true;
        return r;
    }
    std::vector<double> xs, ys;
    for (const auto& [d, m] : pairs) {
        if (m > 1e-13 * top) {
            xs.push_back(d);
            ys.push_back(std::log(m));
        }
    }
    if (xs.size() <= 2) {
        r.strictly_local = true;
        r.fitted_xi = 1.0;
        r.r_squared = 1.0;
    } else {
        const LineFit f = least_squares(xs, ys);
        r.fitted_xi = f.slope < 0.0 ? -1.0 / f.slope : std::numeric_limits<double>::infinity();
        r.r_squared = f.r_squared;
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double c = std::isinf(r.fitted_xi) ? std::exp(ys[i])
                                                 : std::exp(ys[i] + xs[i] / r.fitted_xi);
        r.fitted_C = std::max(r.fitted_C, c);
    }
    return r;
}

DecayFitReport check_locality(const Eigen::MatrixXcd& m, const LatticePatch& patch) {
    if (m.rows() != patch.size() || m.cols() != patch.size())
        throw ValidationError("dimension_mismatch", "operator does not match patch size");
    std::map<int, double> bins;
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i) {
            double& b = bins[patch.graph_distance(i, j)];
            b = std::max(b, std::abs(m(i, j)));
        }
    std::vector<std::pair<double, double>> pairs;
    for (const auto& [d, v] : bins)
        pairs.emplace_back(d, v);
    return fit_decay(std::move(pairs));
}

DecayFitReport check_locality(const HermitianOperator& h) {
    return check_locality(h.matrix(), h.patch());
}

BoundaryDecayReport boundary_decay(const HermitianOperator& h_restricted,
                                   const HermitianOperator& h_perturbed, double xi_prime) {
    const LatticePatch& patch = h_restricted.patch();
    if (!(patch == h_perturbed.patch()))
        throw ValidationError("patch_mismatch", "operators live on different patches");
    if (!(xi_prime > 0.0))
        throw ValidationError("bad_decay_length", "xi_prime must be positive");
    const Eigen::MatrixXcd diff = h_restricted.matrix() - h_perturbed.matrix();
    std::vector<double> bins(patch.extent_x2(), 0.0);
    for (Index j = 0; j < diff.cols(); ++j)
        for (Index i = 0; i < diff.rows(); ++i) {
            const int d = std::max(patch.depth(patch.site(i)), patch.depth(patch.site(j)));
            bins[d] = std::max(bins[d], std::abs(diff(i, j)));
        }
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t d = 0; d < bins.size(); ++d)
        pairs.emplace_back(double(d), bins[d]);

    BoundaryDecayReport r;
    r.fit = fit_decay(std::move(pairs));
    if (r.fit.zero)
        r.rate = std::numeric_limits<double>::infinity();
    else if (r.fit.strictly_local)
        r.rate = 0.0; // too few bins to measure a rate
    else
        r.rate = 1.0 / r.fit.fitted_xi;
    r.bound_ok = r.rate >= 1.0 / xi_prime - 0.1;
    return r;
}

CommutatorReport commutator_decay(const Eigen::MatrixXcd& w, const LatticePatch& patch) {
    const Index n = patch.size();
    if (w.rows() != n || w.cols() != n)
        throw ValidationError("dimension_mismatch", "unitary does not match patch size");
    const int step = edge_step(patch);
    const bool periodic = patch.bc_x1() == Boundary::periodic;

    Eigen::VectorXd pi(n);
    std::vector<double> dist(n);
    for (Index i = 0; i < n; ++i) {
        const Site s = patch.site(i);
        pi(i) = s.x1 >= step ? 1.0 : 0.0;
        double d = std::abs(s.x1 - (step - 0.5));
        if (periodic) {
            const double seam = std::min(std::abs(s.x1 - (patch.first_x1() - 0.5)),
                                         std::abs(s.x1 - (patch.first_x1() + patch.extent_x1() - 0.5)));
            d = std::min(d, seam);
        }
        dist[i] = d;
    }
    const auto p = pi.cast<cplx>().asDiagonal();
    const Eigen::MatrixXcd k = w * p - Eigen::MatrixXcd(p) * w;

    CommutatorReport r;
    std::map<double, double> bins;
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) {
            const double e = std::abs(k(i, j));
            if (e == 0.0)
                continue;
            double& b = bins[std::max(dist[i], dist[j])];
            b = std::max(b, e);
            r.max_entry = std::max(r.max_entry, e);
        }
    std::vector<std::pair<double, double>> pairs(bins.begin(), bins.end());
    r.decay = fit_decay(std::move(pairs));

    const Eigen::VectorXd sv = Eigen::BDCSVD<Eigen::MatrixXcd>(k).singularValues();
    double sum = 0.0;
    for (Index i = 0; i < sv.size(); ++i) {
        r.singular_values.push_back(sv(i));
        sum += sv(i);
        r.partial_sums.push_back(sum);
    }
    r.nuclear_norm = sum;
    if (sv.size() > 0 && sv(0) > 0.0) {
        while (r.knee < sv.size() && sv(r.knee) >= 1e-2 * sv(0))
            ++r.knee;
        const double head = r.knee > 0 ? r.partial_sums[std::size_t(r.knee - 1)] : 0.0;
        r.tail_fraction = (sum - head) / sum;
    }

    const Eigen::MatrixXcd wd = w.adjoint();
    const Eigen::MatrixXcd comm_adj = wd * p - Eigen::MatrixXcd(p) * wd;
    const double d1 = (k.adjoint() + comm_adj).cwiseAbs().maxCoeff();
    const Eigen::MatrixXcd lhs = wd * p * w - Eigen::MatrixXcd(p);
    const double d2 = (lhs + wd * k).cwiseAbs().maxCoeff();
    r.adjoint_identity_defect = std::max(d1, d2);
    return r;
}

std::vector<UnitaryAtom> unitary_spectral_measure(const Eigen::MatrixXcd& b,
                                                  const Eigen::VectorXcd& psi) {
    if (psi.size() != b.rows())
        throw ValidationError("dimension_mismatch", "state does not match operator dimension");
    const SchurSpectrum s = schur_spectrum(b);
    const Eigen::VectorXcd overlaps = s.vectors.adjoint() * psi;
    std::vector<UnitaryAtom> atoms;
    for (Index j = 0; j < s.values.size(); ++j)
        atoms.push_back({s.values(j), std::norm(overlaps(j))});
    return atoms;
}

MappingReport verify_spectral_mapping(const Eigen::MatrixXcd& a, const SwitchFunction& g,
                                      std::uint64_t seed, int arcs, int states) {
    const SpectralDecomposition da = eigh(a);
    const Eigen::MatrixXcd b = edge_unitary(da, g);
    const SchurSpectrum sb = schur_spectrum(b);
    const Index n = da.dim();

    std::vector<cplx> images(n), direct(n);
    std::vector<double> image_angle(n), direct_angle(n);
    for (Index i = 0; i < n; ++i) {
        images[i] = w_g(da.eigenvalues(i), g);
        direct[i] = sb.values(i);
        image_angle[i] = circle_angle(images[i]);
        direct_angle[i] = circle_angle(direct[i]);
    }

    MappingReport r;
    r.dim = n;
    r.arcs = arcs;
    r.states = states;
    r.eigenvalue_deviation = multiset_deviation(images, direct);

    UniformStream rng(seed);
    std::vector<std::pair<double, double>> arc_list;
    for (int a_i = 0; a_i < arcs; ++a_i) {
        double t0 = 0.01 + (two_pi - 0.02) * rng.next();
        double t1 = 0.01 + (two_pi - 0.02) * rng.next();
        if (t0 > t1)
            std::swap(t0, t1);
        arc_list.emplace_back(t0, t1);
    }
    for (int s = 0; s < states; ++s) {
        const Eigen::VectorXcd psi = random_unit_state(n, rng);
        const Eigen::VectorXcd wa = da.eigenvectors.adjoint() * psi;
        const Eigen::VectorXcd wb = sb.vectors.adjoint() * psi;
        for (const auto& [t0, t1] : arc_list) {
            double lhs = 0.0, rhs = 0.0;
            for (Index i = 0; i < n; ++i) {
                if (direct_angle[i] > t0 && direct_angle[i] < t1)
                    lhs += std::norm(wb(i));
                if (image_angle[i] > t0 && image_angle[i] < t1)
                    rhs += std::norm(wa(i));
            }
            r.measure_deviation = std::max(r.measure_deviation, std::abs(lhs - rhs));
        }
    }
    return r;
}

WindowedMappingReport verify_windowed_mapping(const Eigen::MatrixXcd& a, const SwitchFunction& g,
                                              const Interval& gap, double epsilon) {
    if (!(epsilon >= 0.0) || epsilon >= 0.5 * gap.width())
        throw ValidationError("epsilon_too_large", "epsilon must lie in [0, |gap|/2)");
    WindowedMappingReport r;
    r.shrunk_gap = {gap.lo + epsilon, gap.hi - epsilon};
    // g is nonincreasing, so Delta_eps = (a, b) maps onto (2 pi g(b), 2 pi g(a))
    r.arc_lo = two_pi * g(r.shrunk_gap.hi);
    r.arc_hi = two_pi * g(r.shrunk_gap.lo);
    r.delta = std::min(r.arc_lo, two_pi - r.arc_hi);

    const SpectralDecomposition da = eigh(a);
    const Eigen::MatrixXcd b = edge_unitary(da, g);
    const SchurSpectrum sb = schur_spectrum(b);
    const auto on_arc = [&](cplx z) {
        const double t = circle_angle(z);
        return t > r.arc_lo && t < r.arc_hi;
    };

    // g is flat outside its window, so W_g is invertible on Delta_eps only if
    // the window covers it
    r.injective = g.window().lo <= r.shrunk_gap.lo && g.window().hi >= r.shrunk_gap.hi;

    std::vector<cplx> from_a, from_b, images;
    std::vector<double> lambdas;
    for (Index i = 0; i < da.dim(); ++i) {
        const double lambda = da.eigenvalues(i);
        if (!r.shrunk_gap.contains(lambda))
            continue;
        const cplx z = w_g(lambda, g);
        lambdas.push_back(lambda);
        images.push_back(z);
        if (on_arc(z))
            from_a.push_back(z);
    }
    for (Index i = 0; i < sb.values.size(); ++i)
        if (on_arc(sb.values(i)))
            from_b.push_back(sb.values(i));

    const double merge = 1e-9 * std::max(da.scale, 1.0);
    for (std::size_t i = 1; i < lambdas.size(); ++i)
        if (lambdas[i] - lambdas[i - 1] > merge && std::abs(images[i] - images[i - 1]) <= 1e-12)
            r.injective = false;

    r.count_a = int(from_a.size());
    r.count_b = int(from_b.size());
    r.max_deviation = multiset_deviation(from_a, from_b);
    r.bijection = r.count_a == r.count_b && r.max_deviation <= 1e-10;
    return r;
}

EdgeSpectrumReport edge_spectrum(const ModelSpec& spec, const LatticePatch& patch, int k_points,
                                 const Interval& gap, int localization_length) {
    if (patch.bc_x1() != Boundary::periodic)
        throw ValidationError("not_translation_invariant", "edge spectrum needs periodic x1");
    if (spec.disorder_strength != 0.0)
        throw ValidationError("disordered_model",
                              "disordered models have no momentum decomposition; use transport");
    if (k_points < 2)
        throw ValidationError("bad_k_points", "need at least 2 momenta");
    if (localization_length < 1)
        throw ValidationError("bad_localization_length", "localization length must be positive");

    const int cell = spec.kind == ModelKind::trivial_atomic ? 2 : 1;
    const int l2 = patch.extent_x2();
    const LatticePatch ring(3 * cell, l2, Boundary::periodic, patch.bc_x2(), 1, patch.first_x2());
    const HermitianOperator h = build_model(ring, spec);
    const Index dim = Index(cell) * l2;
    const auto block_index = [&](Site s) { return Index(s.x2 - ring.first_x2()) * cell + (s.x1 - 1) % cell; };

    struct Term {
        Index row, col;
        int shift;
        cplx value;
    };
    std::vector<Term> terms;
    for (Index i = 0; i < ring.size(); ++i) {
        const Site si = ring.site(i);
        if (si.x1 <= cell || si.x1 > 2 * cell)
            continue; // rows from the middle cell only
        for (Index j = 0; j < ring.size(); ++j) {
            const cplx v = h.matrix()(i, j);
            if (v == cplx(0.0))
                continue;
            const Site sj = ring.site(j);
            int shift = sj.x1 - si.x1;
            if (shift > 3 * cell / 2)
                shift -= 3 * cell;
            if (shift < -(3 * cell) / 2)
                shift += 3 * cell;
            terms.push_back({block_index(si), block_index(sj), shift, v});
        }
    }

    EdgeSpectrumReport r;
    r.gap = gap;
    r.localization_length = localization_length;
    r.bands.resize(k_points, dim);
    r.weight_bottom.resize(k_points, dim);
    r.weight_top.resize(k_points, dim);
    for (int kk = 0; kk < k_points; ++kk) {
        const double k = two_pi * kk / k_points;
        r.momenta.push_back(k);
        Eigen::MatrixXcd hk = Eigen::MatrixXcd::Zero(dim, dim);
        for (const Term& t : terms)
            hk(t.row, t.col) += t.value * std::polar(1.0, k * t.shift);
        hk = 0.5 * (hk + hk.adjoint()).eval();
        const SpectralDecomposition d = eigh(hk);
        for (Index n = 0; n < dim; ++n) {
            r.bands(kk, n) = d.eigenvalues(n);
            double bottom = 0.0, top = 0.0;
            for (Index a = 0; a < dim; ++a) {
                const Index depth = a / cell;
                const double m = std::norm(d.eigenvectors(a, n));
                if (depth < localization_length)
                    bottom += m;
                if (depth >= l2 - localization_length)
                    top += m;
            }
            r.weight_bottom(kk, n) = bottom;
            r.weight_top(kk, n) = top;
        }
    }
    return r;
}

double gap_coverage(const EdgeSpectrumReport& bands, const Interval& window) {
    std::vector<double> energies;
    for (Index k = 0; k < bands.bands.rows(); ++k)
        for (Index n = 0; n < bands.bands.cols(); ++n)
            if (bands.edge_weight(k, n) >= 0.5)
                energies.push_back(bands.bands(k, n));
    if (energies.empty())
        return std::numeric_limits<double>::infinity();
    std::sort(energies.begin(), energies.end());
    const auto nearest = [&](double mu) {
        const auto it = std::lower_bound(energies.begin(), energies.end(), mu);
        double d = std::numeric_limits<double>::infinity();
        if (it != energies.end())
            d = *it - mu;
        if (it != energies.begin())
            d = std::min(d, mu - *(it - 1));
        return d;
    };
    double worst = std::max(nearest(window.lo), nearest(window.hi));
    for (std::size_t i = 1; i < energies.size(); ++i) {
        const double mid = 0.5 * (energies[i - 1] + energies[i]);
        if (mid > window.lo && mid < window.hi)
            worst = std::max(worst, nearest(mid));
    }
    return worst;
}

TransportTrace transport_spread(const HermitianOperator& h, const Interval& gap, Site x0,
                                const std::vector<double>& times,
                                const TransportOptions& options) {
    const LatticePatch& patch = h.patch();
    if (!patch.contains(x0))
        throw ValidationError("site_outside_patch", "x0 is not part of the patch");
    if (times.empty() || !std::is_sorted(times.begin(), times.end()) || times.front() < 0.0)
        throw ValidationError("bad_times", "times must be nonempty, nonnegative and increasing");
    const double eps = options.eps_fraction * gap.width();
    const Interval shrunk{gap.lo + eps, gap.hi - eps};
    if (!(shrunk.width() > 0.0))
        throw ValidationError("epsilon_too_large", "shrunk gap is empty");

    const SpectralDecomposition d = eigh(h);
    const Index x0i = patch.index(x0);
    Eigen::VectorXcd c(d.dim());
    for (Index n = 0; n < d.dim(); ++n) {
        const double e = d.eigenvalues(n);
        double f = 0.0;
        if (shrunk.contains(e)) {
            const double u = std::cos(std::numbers::pi * (e - shrunk.center()) / shrunk.width());
            f = u * u;
        }
        c(n) = f * std::conj(d.eigenvectors(x0i, n));
    }
    TransportTrace tr;
    tr.filter_norm = c.norm();
    if (tr.filter_norm < 1e-3)
        throw ValidationError("no_gap_weight", "no gap weight at x0");
    c /= tr.filter_norm;

    const bool bottom_edge = patch.depth(x0) < patch.extent_x2() / 2;
    const int l1_lo = patch.first_x1() + options.boundary_margin;
    const int l1_hi = patch.first_x1() + patch.extent_x1() - 1 - options.boundary_margin;
    bool trusted = true;
    for (double t : times) {
        Eigen::VectorXcd phase(d.dim());
        for (Index n = 0; n < d.dim(); ++n)
            phase(n) = c(n) * std::polar(1.0, -d.eigenvalues(n) * t);
        const Eigen::VectorXcd psi = d.eigenvectors * phase;
        double m1 = 0, m2 = 0, msd = 0, edge = 0, boundary = 0;
        for (Index i = 0; i < psi.size(); ++i) {
            const Site s = patch.site(i);
            const double p = std::norm(psi(i));
            m1 += p * s.x1;
            m2 += p * double(s.x1) * s.x1;
            msd += p * double(s.x1 - x0.x1) * (s.x1 - x0.x1);
            const int depth = bottom_edge ? patch.depth(s) : patch.extent_x2() - 1 - patch.depth(s);
            if (depth < options.localization_length)
                edge += p;
            if (s.x1 < l1_lo || s.x1 > l1_hi)
                boundary += p;
        }
        tr.times.push_back(t);
        tr.spread.push_back(std::max(0.0, m2 - m1 * m1));
        tr.msd.push_back(msd);
        tr.edge_weight.push_back(edge);
        tr.boundary_mass.push_back(boundary);
        trusted = trusted && boundary <= options.boundary_tolerance;
        if (trusted)
            ++tr.trusted;
    }

    std::vector<double> lx, ly;
    for (Index i = 0; i < tr.trusted; ++i) {
        const double inc = tr.msd[i] - tr.msd[0];
        if (tr.times[i] > 0.0 && inc > 0.0) {
            lx.push_back(std::log(tr.times[i]));
            ly.push_back(std::log(inc));
        }
    }
    if (lx.size() < 3)
        throw ValidationError("empty_trusted_window", "trusted window too short; enlarge patch");
    const LineFit f = least_squares(lx, ly);
    tr.alpha = f.slope;
    tr.alpha_r_squared = f.r_squared;
    return tr;
}

void write_bands_csv(std::ostream& os, const EdgeSpectrumReport& bands) {
    os << "k,n,E,edge_weight,which_edge\n";
    for (Index k = 0; k < bands.bands.rows(); ++k)
        for (Index n = 0; n < bands.bands.cols(); ++n)
            os << format_double(bands.momenta[std::size_t(k)]) << ',' << n << ','
               << format_double(bands.bands(k, n)) << ',' << format_double(bands.edge_weight(k, n))
               << ',' << to_string(bands.which_edge(k, n)) << '\n';
}

void write_transport_csv(std::ostream& os, const TransportTrace& trace) {
    os << "t,spread,msd,edge_weight,boundary_mass\n";
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        os << format_double(trace.times[i]) << ',' << format_double(trace.spread[i]) << ','
           << format_double(trace.msd[i]) << ',' << format_double(trace.edge_weight[i]) << ','
           << format_double(trace.boundary_mass[i]) << '\n';
}

void write_decay_csv(std::ostream& os, const DecayFitReport& fit) {
    os << "d,max_entry\n";
    for (const auto& [d, m] : fit.pairs)
        os << format_double(d) << ',' << format_double(m) << '\n';
}

} // namespace edgelab
