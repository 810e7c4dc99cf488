#include "latdet/sphere.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "latdet/complexity.hpp"
#include "latdet/error.hpp"

namespace latdet {

namespace {

constexpr int kMaxRealDims = 32; // search state is stack-allocated

/* MMSE filter output rounded per real dimension onto the level grid. */
Eigen::VectorXcd mmse_round(const Observation& obs, const Constellation& cst) {
    const int m = obs.m();
    double gamma_inv =
        (obs.sigma_w2 > 0.0) ? obs.sigma_w2 / (m * cst.avg_power()) : 0.0;
    Eigen::MatrixXcd A = obs.H.adjoint() * obs.H;
    A.diagonal().array() += gamma_inv;
    Eigen::VectorXcd z = A.ldlt().solve(obs.H.adjoint() * obs.y);
    Eigen::VectorXcd s(m);
    const auto& lv = cst.real_levels();
    for (int j = 0; j < m; ++j)
        s(j) = {double(lv[static_cast<std::size_t>(
                    cst.nearest_level_index(z(j).real()))]),
                double(lv[static_cast<std::size_t>(
                    cst.nearest_level_index(z(j).imag()))])};
    return s;
}

} // namespace

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> qr_preprocess(
    const Eigen::MatrixXd& H_r) {
    const Eigen::Index rows = H_r.rows(), cols = H_r.cols();
    if (rows < cols || cols < 1) throw DimensionError("qr_preprocess: need rows >= cols >= 1");
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(H_r);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
    Eigen::MatrixXd R = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < cols; ++i)
        if (R(i, i) < 0.0) {
            R.row(i) = -R.row(i);
            Q.col(i) = -Q.col(i);
        }
    double dmax = R.diagonal().maxCoeff();
    if (!(dmax > 0.0) || R.diagonal().minCoeff() < 1e-12 * dmax)
        throw SingularChannelError("rank-deficient channel; redraw");
    return {std::move(Q), std::move(R)};
}

SphereSearch::SphereSearch(const Observation& obs, const Constellation& cst)
    : obs_(&obs), cst_(&cst), n_(obs.n()), m_(obs.m()) {
    if (n_ < m_ || m_ < 1) throw DimensionError("SphereSearch: need n >= m >= 1");
    if (obs.y.size() != n_) throw DimensionError("SphereSearch: y/H mismatch");
    if (2 * m_ > kMaxRealDims)
        throw DimensionError("SphereSearch: system too large for the search core");

    // column-interleaved embedding so consecutive real levels pair into
    // one complex symbol: col 2j acts on Re s_j, col 2j+1 on Im s_j
    Eigen::MatrixXd Hi(2 * n_, 2 * m_);
    for (int j = 0; j < m_; ++j) {
        Hi.col(2 * j).head(n_) = obs.H.col(j).real();
        Hi.col(2 * j).tail(n_) = obs.H.col(j).imag();
        Hi.col(2 * j + 1).head(n_) = -obs.H.col(j).imag();
        Hi.col(2 * j + 1).tail(n_) = obs.H.col(j).real();
    }
    Eigen::VectorXd y_r(2 * n_);
    y_r.head(n_) = obs.y.real();
    y_r.tail(n_) = obs.y.imag();

    auto [Q, R] = qr_preprocess(Hi);
    R_ = std::move(R);
    qty_ = Q.transpose() * y_r;
    rho_ = std::max(0.0, y_r.squaredNorm() - qty_.squaredNorm());
    babai_point_ = mmse_round(obs, cst);
    babai_dist_ = (obs.y - obs.H * babai_point_).norm();
}

double SphereSearch::babai_distance() const { return babai_dist_; }

double SphereSearch::tree_metric(const Eigen::VectorXcd& s) const {
    if (s.size() != m_) throw DimensionError("tree_metric: wrong length");
    const int D = 2 * m_;
    std::array<double, kMaxRealDims> xlev{};
    for (int j = 0; j < m_; ++j) {
        xlev[static_cast<std::size_t>(2 * j)] = s(j).real();
        xlev[static_cast<std::size_t>(2 * j + 1)] = s(j).imag();
    }
    double acc = rho_;
    for (int i = D - 1; i >= 0; --i) {
        double ksi = qty_(i);
        for (int j = i + 1; j < D; ++j)
            ksi -= R_(i, j) * xlev[static_cast<std::size_t>(j)];
        double diff = ksi - R_(i, i) * xlev[static_cast<std::size_t>(i)];
        acc += diff * diff;
    }
    return acc;
}

double SphereSearch::guaranteed_radius() const {
    double r = std::sqrt(tree_metric(babai_point_)) * (1.0 + 1e-12);
    return std::max(r, 1e-9);
}

template <typename LeafFn>
void SphereSearch::enumerate(double radius2, bool tighten,
                             std::int64_t* visited, LeafFn&& leaf) const {
    const int D = 2 * m_;
    const int M = cst_->levels_per_dim();
    const bool se = tighten; // Schnorr-Euchner ordering goes with tightening

    std::array<double, kMaxRealDims> lv{};
    for (int v = 0; v < M; ++v)
        lv[static_cast<std::size_t>(v)] =
            double(cst_->real_levels()[static_cast<std::size_t>(v)]);

    double bound = radius2;
    if (rho_ > bound) return; // residual outside col(H_r) already too large

    std::array<double, kMaxRealDims> ksi{}, dist_acc{}, xlev{}, cval{}, rdiag{};
    std::array<int, kMaxRealDims> lvl{};
    std::array<int, kMaxRealDims> nxt{}, lp{}, rp{}, fpos{};
    std::array<bool, kMaxRealDims> live{};
    for (int i = 0; i < D; ++i) rdiag[static_cast<std::size_t>(i)] = R_(i, i);

    auto setup_row = [&](int i) {
        double acc = qty_(i);
        for (int j = i + 1; j < D; ++j)
            acc -= R_(i, j) * xlev[static_cast<std::size_t>(j)];
        ksi[static_cast<std::size_t>(i)] = acc;
        double c = acc / rdiag[static_cast<std::size_t>(i)];
        cval[static_cast<std::size_t>(i)] = c;
        if (se) {
            int ci = cst_->nearest_level_index(c);
            nxt[static_cast<std::size_t>(i)] = ci;
            lp[static_cast<std::size_t>(i)] = ci - 1;
            rp[static_cast<std::size_t>(i)] = ci + 1;
        } else {
            fpos[static_cast<std::size_t>(i)] = 0;
        }
        live[static_cast<std::size_t>(i)] = true;
    };

    // next level index in row order, -1 when the row is exhausted
    auto next_candidate = [&](int i) -> int {
        auto ii = static_cast<std::size_t>(i);
        if (!live[ii]) return -1;
        if (!se) {
            if (fpos[ii] >= M) return -1;
            return fpos[ii]++;
        }
        int idx = nxt[ii];
        if (lp[ii] >= 0 && rp[ii] < M) {
            // closer side first; tie goes left for determinism
            if (cval[ii] - lv[static_cast<std::size_t>(lp[ii])] <=
                lv[static_cast<std::size_t>(rp[ii])] - cval[ii])
                nxt[ii] = lp[ii]--;
            else
                nxt[ii] = rp[ii]++;
        } else if (lp[ii] >= 0) {
            nxt[ii] = lp[ii]--;
        } else if (rp[ii] < M) {
            nxt[ii] = rp[ii]++;
        } else {
            live[ii] = false;
        }
        return idx;
    };

    int i = D - 1;
    dist_acc[static_cast<std::size_t>(i)] = rho_;
    setup_row(i);

    while (true) {
        int idx = next_candidate(i);
        if (idx < 0) {
            if (i == D - 1) break;
            ++i;
            continue;
        }
        auto ii = static_cast<std::size_t>(i);
        double diff = ksi[ii] - rdiag[ii] * lv[static_cast<std::size_t>(idx)];
        double nd = dist_acc[ii] + diff * diff;
        if (nd > bound) {
            if (se || lv[static_cast<std::size_t>(idx)] >= cval[ii]) {
                // partial distances can only grow from here on in this row
                live[ii] = false;
                if (i == D - 1) break;
                ++i;
            }
            continue;
        }
        lvl[ii] = idx;
        xlev[ii] = lv[static_cast<std::size_t>(idx)];
        int fixed = D - i;
        if (visited && !(fixed & 1)) ++visited[static_cast<std::size_t>((fixed >> 1) - 1)];
        if (i == 0) {
            double nb = leaf(nd, lvl.data());
            if (tighten && nb < bound) bound = nb;
            continue;
        }
        --i;
        dist_acc[static_cast<std::size_t>(i)] = nd;
        setup_row(i);
    }
}

DecodeOutcome SphereSearch::decode(double radius, EnumMode mode) const {
    if (!(radius > 0.0)) throw DimensionError("sphere_decode: radius must be > 0");
    const int M = cst_->levels_per_dim();
    DecodeOutcome out;
    out.visited.assign(static_cast<std::size_t>(m_), 0);

    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    std::array<int, kMaxRealDims> best_lvl{};

    // lexicographic order over complex symbol indices (real-part major)
    auto lex_less = [&](const int* a, const int* b) {
        for (int j = 0; j < m_; ++j) {
            int ca = a[2 * j] * M + a[2 * j + 1];
            int cb = b[2 * j] * M + b[2 * j + 1];
            if (ca != cb) return ca < cb;
        }
        return false;
    };

    enumerate(radius * radius, mode == EnumMode::SchnorrEuchner,
              out.visited.data(), [&](double nd, const int* x) {
                  if (!found || nd < best ||
                      (nd == best && lex_less(x, best_lvl.data()))) {
                      std::copy(x, x + 2 * m_, best_lvl.begin());
                      best = nd;
                      found = true;
                  }
                  return best;
              });

    for (int k = 1; k <= m_; ++k)
        out.flops += f_sp(k, M) * out.visited[static_cast<std::size_t>(k - 1)];
    if (found) {
        Eigen::VectorXcd s(m_);
        const auto& lvs = cst_->real_levels();
        for (int j = 0; j < m_; ++j)
            s(j) = {double(lvs[static_cast<std::size_t>(best_lvl[static_cast<std::size_t>(2 * j)])]),
                    double(lvs[static_cast<std::size_t>(best_lvl[static_cast<std::size_t>(2 * j + 1)])])};
        out.solution = std::move(s);
        out.dist2 = best;
    }
    return out;
}

std::int64_t SphereSearch::count_points(double radius) const {
    if (radius < 0.0) throw DimensionError("count_points: radius must be >= 0");
    std::int64_t count = 0;
    enumerate(radius * radius, false, nullptr, [&](double, const int*) {
        ++count;
        return std::numeric_limits<double>::infinity();
    });
    return count;
}

std::vector<double> SphereSearch::collect_distances(double radius,
                                                    std::size_t budget) const {
    std::vector<double> out;
    enumerate(radius * radius, false, nullptr, [&](double nd, const int*) {
        if (out.size() >= budget)
            throw BudgetError("collect_distances: too many points in sphere");
        out.push_back(std::sqrt(std::max(0.0, nd)));
        return std::numeric_limits<double>::infinity();
    });
    return out;
}

DecodeOutcome sphere_decode(const Observation& obs, const Constellation& cst,
                            double radius, EnumMode mode) {
    return SphereSearch(obs, cst).decode(radius, mode);
}

std::int64_t count_points_in_sphere(const Observation& obs,
                                    const Constellation& cst, double radius) {
    return SphereSearch(obs, cst).count_points(radius);
}

std::pair<Eigen::VectorXcd, double> brute_force_mld(const Observation& obs,
                                                    const Constellation& cst,
                                                    std::int64_t budget) {
    const int m = obs.m();
    std::int64_t total = 1;
    for (int j = 0; j < m; ++j) {
        if (total > budget / cst.order())
            throw BudgetError("brute_force_mld: search space exceeds budget");
        total *= cst.order();
    }

    std::vector<int> idx(static_cast<std::size_t>(m), 0);
    Eigen::VectorXcd s(m);
    for (int j = 0; j < m; ++j) s(j) = cst.point(0);

    Eigen::VectorXcd best_s;
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t c = 0; c < total; ++c) {
        double d2 = (obs.y - obs.H * s).squaredNorm();
        if (d2 < best) { // strict: first hit in lexicographic order wins ties
            best = d2;
            best_s = s;
        }
        // odometer, last symbol fastest = lexicographic index order
        for (int j = m - 1; j >= 0; --j) {
            auto jj = static_cast<std::size_t>(j);
            if (++idx[jj] < cst.order()) {
                s(j) = cst.point(idx[jj]);
                break;
            }
            idx[jj] = 0;
            s(j) = cst.point(0);
        }
    }
    return {std::move(best_s), best};
}

RadiusVector q_closest_distances(const Observation& obs,
                                 const Constellation& cst, int q,
                                 std::size_t budget) {
    if (q < 1) throw DimensionError("q_closest_distances: q must be >= 1");
    SphereSearch ctx(obs, cst);

    std::int64_t lattice_size = 1;
    bool lattice_size_huge = false;
    for (int j = 0; j < obs.m(); ++j) {
        lattice_size *= cst.order();
        if (lattice_size > static_cast<std::int64_t>(budget)) {
            lattice_size_huge = true;
            break;
        }
    }

    double r = ctx.guaranteed_radius();
    std::vector<double> distinct;
    for (int grow = 0;; ++grow) {
        if (grow > 200)
            throw BudgetError("q_closest_distances: radius growth did not settle");
        std::vector<double> ds = ctx.collect_distances(r, budget);
        std::sort(ds.begin(), ds.end());
        distinct.clear();
        for (double d : ds)
            if (distinct.empty() ||
                d - distinct.back() > 1e-9 + 1e-12 * d)
                distinct.push_back(d);
        if (static_cast<int>(distinct.size()) >= q) break;
        if (!lattice_size_huge &&
            static_cast<std::int64_t>(ds.size()) == lattice_size)
            throw BudgetError(
                "q_closest_distances: q exceeds the number of distinct distances");
        r *= 2.0;
    }

    RadiusVector rv;
    rv.radii.assign(distinct.begin(), distinct.begin() + q);
    rv.radii[0] = std::max(rv.radii[0], 1e-9);
    return rv;
}

SdirsResult sdirs_decode(const Observation& obs, const Constellation& cst,
                         int max_rounds) {
    if (max_rounds < 1) throw DimensionError("sdirs_decode: max_rounds >= 1");
    SphereSearch ctx(obs, cst);
    SdirsResult res;
    res.visited.assign(static_cast<std::size_t>(obs.m()), 0);

    auto accumulate = [&](const DecodeOutcome& out) {
        for (std::size_t k = 0; k < out.visited.size(); ++k)
            res.visited[k] += out.visited[k];
        res.flops += out.flops;
    };

    auto schedule = (max_rounds > 1)
                        ? spi_schedule_x(obs.n(), max_rounds - 1)
                        : nullptr;
    for (int i = 1; i < max_rounds; ++i) {
        double r = std::max(
            std::sqrt(obs.sigma_w2 * (*schedule)[static_cast<std::size_t>(i - 1)]),
            1e-9);
        DecodeOutcome out = ctx.decode(r, EnumMode::SchnorrEuchner);
        accumulate(out);
        if (out.solution) {
            res.solution = *out.solution;
            res.rounds_used = i;
            res.accept_radius = r;
            return res;
        }
    }

    // last resort: the Babai point itself lies inside this sphere
    double r = ctx.guaranteed_radius();
    for (int tries = 0; tries < 64; ++tries) {
        DecodeOutcome out = ctx.decode(r, EnumMode::SchnorrEuchner);
        accumulate(out);
        if (out.solution) {
            res.solution = *out.solution;
            res.rounds_used = max_rounds;
            res.accept_radius = r;
            res.used_babai_round = true;
            return res;
        }
        r *= 2.0;
    }
    throw std::logic_error("sdirs_decode: Babai-radius round found no point");
}

} // namespace latdet
