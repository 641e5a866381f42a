// Benchmark comparing the serial reference kernels against the OpenMP ones:
// hull-distance trace annotation and the Monte-Carlo ensemble.

#include <chrono>
#include <iomanip>
#include <iostream>

#include "containment/harness.hpp"

using namespace containment;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

}  // namespace

int main() {
    std::cout << std::fixed << std::setprecision(3);

    {
        Scenario scenario = builtin_scenario("paper-continuous-example");
        scenario.horizon = 30.0;
        scenario.output_interval = 0.005;  // dense sampling to give the kernel work
        const auto synthesis = synthesize(scenario);
        auto trace = run_high_order_full_info(scenario, synthesis.gains_used, ExecMode::Serial);

        auto serial_copy = trace;
        auto start = clock_type::now();
        annotate_hull_distances_serial(serial_copy);
        const double serial_time = seconds_since(start);

        auto parallel_copy = trace;
        start = clock_type::now();
        annotate_hull_distances_parallel(parallel_copy);
        const double parallel_time = seconds_since(start);

        bool identical = true;
        for (size_t i = 0; i < serial_copy.samples.size(); ++i)
            identical = identical && serial_copy.samples[i].containment_error ==
                                         parallel_copy.samples[i].containment_error;

        std::cout << "hull annotation over " << trace.samples.size() << " samples\n"
                  << "  serial:   " << serial_time << " s\n"
                  << "  parallel: " << parallel_time << " s  (speedup "
                  << serial_time / parallel_time << "x, results "
                  << (identical ? "identical" : "DIFFER") << ")\n";
    }

    {
        Scenario scenario = builtin_scenario("discrete-noisy-example");
        const auto synthesis = synthesize(scenario);
        const int runs = 64;

        auto start = clock_type::now();
        const auto serial_report = run_monte_carlo_serial(scenario, synthesis.gains_used, runs);
        const double serial_time = seconds_since(start);

        start = clock_type::now();
        const auto parallel_report = run_monte_carlo_parallel(scenario, synthesis.gains_used, runs);
        const double parallel_time = seconds_since(start);

        bool identical = serial_report.mean_hull_distance == parallel_report.mean_hull_distance &&
                         serial_report.second_moment == parallel_report.second_moment;

        std::cout << "monte carlo, " << runs << " runs of " << scenario.discrete_steps()
                  << " steps\n"
                  << "  serial:   " << serial_time << " s\n"
                  << "  parallel: " << parallel_time << " s  (speedup "
                  << serial_time / parallel_time << "x, results "
                  << (identical ? "identical" : "DIFFER") << ")\n";
    }
    return 0;
}
