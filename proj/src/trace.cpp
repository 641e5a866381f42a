#include "containment/trace.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "containment/geometry.hpp"

namespace containment {

namespace {

void annotate_sample(TraceSample& sample) {
    const size_t n = sample.follower_positions.size();
    sample.hull_distances.assign(n, 0.0);
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sample.hull_distances[i] =
            hull_distance(sample.follower_positions[i], sample.leader_positions).distance;
        total += sample.hull_distances[i];
    }
    sample.containment_error = total;
}

}  // namespace

void annotate_hull_distances_serial(ContainmentTrace& trace) {
    for (auto& sample : trace.samples) annotate_sample(sample);
}

void annotate_hull_distances_parallel(ContainmentTrace& trace) {
    const auto count = static_cast<std::ptrdiff_t>(trace.samples.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < count; ++i)
        annotate_sample(trace.samples[static_cast<size_t>(i)]);
}

void annotate_hull_distances(ContainmentTrace& trace, ExecMode mode) {
    if (mode == ExecMode::Serial)
        annotate_hull_distances_serial(trace);
    else
        annotate_hull_distances_parallel(trace);
}

void write_trace_csv(const ContainmentTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open trace output file: " + path);
    out.precision(15);

    out << "t,agent";
    for (int c = 0; c < trace.dimension; ++c) out << ",x" << c;
    out << ",hull_dist,containment_error,estimator_error";
    if (trace.has_wheel_commands) out << ",v,omega";
    out << "\n";

    for (const auto& sample : trace.samples) {
        for (int a = 0; a < trace.num_leaders + trace.num_followers; ++a) {
            const bool is_leader = a < trace.num_leaders;
            const Vector& pos = is_leader
                                    ? sample.leader_positions[static_cast<size_t>(a)]
                                    : sample.follower_positions[static_cast<size_t>(a - trace.num_leaders)];
            out << sample.time << ',' << a + 1;
            for (int c = 0; c < trace.dimension; ++c) out << ',' << pos(c);
            const double dist =
                is_leader ? 0.0 : sample.hull_distances[static_cast<size_t>(a - trace.num_leaders)];
            out << ',' << dist << ',' << sample.containment_error << ','
                << sample.estimator_error_norm;
            if (trace.has_wheel_commands) {
                if (is_leader || sample.wheel_commands.empty()) {
                    out << ",0,0";
                } else {
                    const auto& vw = sample.wheel_commands[static_cast<size_t>(a - trace.num_leaders)];
                    out << ',' << vw.first << ',' << vw.second;
                }
            }
            out << "\n";
        }
    }
}

DecayFit fit_exponential_decay(const std::vector<double>& times, const std::vector<double>& values,
                               double floor_relative) {
    DecayFit fit;
    if (times.size() != values.size() || times.size() < 3) return fit;

    double peak = 0.0;
    for (double v : values) peak = std::max(peak, v);
    const double floor = std::max(peak * floor_relative, 1e-300);

    // last index still above the floor; the fit window is the second half of
    // the decaying stretch so transients do not bias the rate. When the decay
    // is so fast that the window holds almost nothing, fall back to the whole
    // stretch.
    size_t last = 0;
    for (size_t i = 0; i < values.size(); ++i)
        if (values[i] > floor) last = i;
    if (last < 2) return fit;
    const double t_end = times[last];

    auto fit_from = [&](double t_begin) {
        DecayFit out;
        double sum_t = 0.0, sum_tt = 0.0, sum_y = 0.0, sum_ty = 0.0;
        int n = 0;
        for (size_t i = 0; i <= last; ++i) {
            if (times[i] < t_begin || values[i] <= floor) continue;
            const double y = std::log(values[i]);
            sum_t += times[i];
            sum_tt += times[i] * times[i];
            sum_y += y;
            sum_ty += times[i] * y;
            ++n;
        }
        if (n < 3) return out;
        const double denom = n * sum_tt - sum_t * sum_t;
        if (denom == 0.0) return out;
        const double slope = (n * sum_ty - sum_t * sum_y) / denom;
        out.rate = -slope;
        out.amplitude = std::exp((sum_y - slope * sum_t) / n);
        out.samples_used = n;
        return out;
    };

    fit = fit_from(times.front() + 0.5 * (t_end - times.front()));
    if (fit.samples_used < 8) fit = fit_from(times.front());
    return fit;
}

DecayFit fit_containment_decay(const ContainmentTrace& trace) {
    std::vector<double> times, values;
    times.reserve(trace.samples.size());
    values.reserve(trace.samples.size());
    for (const auto& sample : trace.samples) {
        times.push_back(sample.time);
        values.push_back(sample.containment_error);
    }
    return fit_exponential_decay(times, values);
}

DecayFit fit_estimator_decay(const ContainmentTrace& trace) {
    std::vector<double> times, values;
    times.reserve(trace.samples.size());
    values.reserve(trace.samples.size());
    for (const auto& sample : trace.samples) {
        times.push_back(sample.time);
        values.push_back(sample.estimator_error_norm);
    }
    return fit_exponential_decay(times, values);
}

}  // namespace containment
