#include "latdet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

#include "latdet/complexity.hpp"
#include "latdet/error.hpp"

namespace latdet {

Eigen::VectorXcd mmse_detect(const Observation& obs, const Constellation& cst,
                             double snr_linear) {
    if (!(snr_linear > 0.0)) throw DimensionError("mmse_detect: snr must be > 0");
    const int m = obs.m();
    Eigen::MatrixXcd A = obs.H.adjoint() * obs.H;
    A.diagonal().array() += 1.0 / snr_linear;
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

namespace {

RadiusVector postprocess_radii(const Eigen::VectorXd& predicted,
                               const SphereSearch& ctx) {
    RadiusVector rv;
    rv.radii.resize(static_cast<std::size_t>(predicted.size()));
    for (Eigen::Index c = 0; c < predicted.size(); ++c) {
        double r = predicted(c);
        if (!std::isfinite(r)) r = ctx.babai_distance();
        rv.radii[static_cast<std::size_t>(c)] = r;
    }
    std::sort(rv.radii.begin(), rv.radii.end());
    for (double& r : rv.radii) r = std::max(r, 1e-9);
    return rv;
}

} // namespace

RadiusVector dl_radii(const Observation& obs, const Constellation& cst,
                      const RadiusModel& model) {
    SphereSearch ctx(obs, cst);
    return postprocess_radii(forward(model, stack_input(obs)), ctx);
}

PipelineResult dl_sphere_decode(const Observation& obs,
                                const Constellation& cst,
                                const RadiusModel& model, int q) {
    if (model.n != obs.n() || model.m != obs.m() ||
        model.constellation_order != cst.order() || model.q != q)
        throw DimensionError("dl_sphere_decode: model does not match system");

    SphereSearch ctx(obs, cst);
    PipelineResult res;
    res.radii_used = postprocess_radii(forward(model, stack_input(obs)), ctx);
    res.visited.assign(static_cast<std::size_t>(obs.m()), 0);
    for (int c = 1; c <= q; ++c) {
        DecodeOutcome out = ctx.decode(
            res.radii_used.radii[static_cast<std::size_t>(c - 1)],
            EnumMode::SchnorrEuchner);
        for (std::size_t k = 0; k < out.visited.size(); ++k)
            res.visited[k] += out.visited[k];
        res.sphere_flops += out.flops;
        if (out.solution) {
            res.solution = *out.solution;
            res.path = DecodePath::Sphere;
            res.round = c;
            res.accept_radius =
                res.radii_used.radii[static_cast<std::size_t>(c - 1)];
            return res;
        }
    }

    const double snr_linear =
        obs.m() * cst.avg_power() / std::max(obs.sigma_w2, 1e-300);
    res.solution = mmse_detect(obs, cst, snr_linear);
    res.path = DecodePath::Fallback;
    return res;
}

BatchResult decode_batch(const std::vector<Observation>& observations,
                         const Constellation& cst, const RadiusModel& model,
                         int q, const BatchOptions& opts) {
    BatchResult out;
    const std::size_t count = observations.size();
    out.results.resize(count);
    if (opts.compute_points) out.points_in_sphere.assign(count, 0);
    if (count == 0) return out;

    const std::int64_t net_flops = f_dn(model.params.layer_dims);
    const std::int64_t fallback_flops =
        f_sb(observations.front().m(), observations.front().n());

    auto work = [&](std::size_t first, std::size_t step) {
        for (std::size_t i = first; i < count; i += step) {
            out.results[i] = dl_sphere_decode(observations[i], cst, model, q);
            if (opts.compute_points && out.results[i].path == DecodePath::Sphere)
                out.points_in_sphere[i] = count_points_in_sphere(
                    observations[i], cst, out.results[i].accept_radius);
        }
    };
    const int threads = std::max(1, opts.threads);
    if (threads == 1) {
        work(0, 1);
    } else {
        std::exception_ptr worker_error;
        std::mutex error_mutex;
        auto guarded = [&](std::size_t first, std::size_t step) {
            try {
                work(first, step);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!worker_error) worker_error = std::current_exception();
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(guarded, static_cast<std::size_t>(t),
                              static_cast<std::size_t>(threads));
        for (auto& th : pool) th.join();
        if (worker_error) std::rethrow_exception(worker_error);
    }

    // associative reduction over per-trial records
    std::int64_t err_bits = 0, total_bits = 0, fallbacks = 0, points = 0;
    double flops_sum = 0.0;
    bool have_truth = true;
    for (std::size_t i = 0; i < count; ++i) {
        const auto& r = out.results[i];
        const auto& obs = observations[i];
        std::int64_t fl = r.sphere_flops + net_flops +
                          (r.path == DecodePath::Fallback ? fallback_flops : 0);
        flops_sum += double(fl);
        out.aggregate.max_flops = std::max(out.aggregate.max_flops, fl);
        if (r.path == DecodePath::Fallback) ++fallbacks;
        if (opts.compute_points) points += out.points_in_sphere[i];
        if (obs.truth) {
            for (int j = 0; j < obs.m(); ++j)
                err_bits += cst.bit_errors(r.solution(j), (*obs.truth)(j));
            total_bits += std::int64_t(obs.m()) * cst.bits_per_symbol();
        } else {
            have_truth = false;
        }
    }
    out.aggregate.count = count;
    out.aggregate.ber = (have_truth && total_bits > 0)
                            ? double(err_bits) / double(total_bits)
                            : std::nan("");
    out.aggregate.fallback_rate = double(fallbacks) / double(count);
    out.aggregate.mean_flops = flops_sum / double(count);
    out.aggregate.mean_points_in_sphere =
        opts.compute_points ? double(points) / double(count) : std::nan("");
    return out;
}

} // namespace latdet
