#pragma once

#include <string>
#include <vector>

#include "containment/linalg.hpp"

namespace containment {

enum class ExecMode { Serial, Parallel };

struct TraceSample {
    double time = 0.0;  // t in the continuous domain, k in the discrete one
    std::vector<Vector> leader_positions;
    std::vector<Vector> follower_positions;
    std::vector<double> hull_distances;  // per follower, filled by annotation
    double containment_error = 0.0;
    double estimator_error_norm = 0.0;  // ||Zhat||, 0 when no estimator runs
    std::vector<std::pair<double, double>> wheel_commands;  // (v, omega) per follower, robot runs only
};

struct ContainmentTrace {
    int num_leaders = 0;
    int num_followers = 0;
    int dimension = 0;
    bool has_estimator = false;
    bool has_wheel_commands = false;
    std::vector<TraceSample> samples;

    double initial_error() const { return samples.front().containment_error; }
    double final_error() const { return samples.back().containment_error; }
};

// Hull-distance annotation is the data-parallel kernel of the pipeline: every
// sample is independent. The serial variant is the reference implementation;
// the parallel one fans the sample loop out over OpenMP threads and must
// produce bit-identical results.
void annotate_hull_distances_serial(ContainmentTrace& trace);
void annotate_hull_distances_parallel(ContainmentTrace& trace);
void annotate_hull_distances(ContainmentTrace& trace, ExecMode mode = ExecMode::Parallel);

/// CSV emission: t, agent (1-based, leaders first), position components,
/// per-agent hull distance (0 for leaders), aggregate containment error,
/// estimator error norm, and (v, omega) when wheel commands were recorded.
void write_trace_csv(const ContainmentTrace& trace, const std::string& path);

// Least-squares fit of log(values) ~ log(C) - beta * time over the tail of the
// decay, skipping samples at the numerical floor.
struct DecayFit {
    double amplitude = 0.0;  // C
    double rate = 0.0;       // beta (positive = decaying)
    int samples_used = 0;
};

DecayFit fit_exponential_decay(const std::vector<double>& times, const std::vector<double>& values,
                               double floor_relative = 1e-9);

DecayFit fit_containment_decay(const ContainmentTrace& trace);
DecayFit fit_estimator_decay(const ContainmentTrace& trace);

}  // namespace containment
