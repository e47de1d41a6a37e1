#ifndef RSPSIM_ERRORS_HPP
#define RSPSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rsp {

// Argument outside the physically meaningful range (e.g. detector plane
// outside [f, 2f], invalid slit count).
struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A quadrature failed to reach its requested tolerance.
struct numeric_error : std::runtime_error {
    numeric_error(const std::string& msg, double achieved)
        : std::runtime_error(msg), achieved_tolerance(achieved) {}
    double achieved_tolerance;
};

// Detector position sits on a diffraction zero: the conditional state is
// numerically undefined there.
struct degenerate_point_error : std::runtime_error {
    explicit degenerate_point_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Detector window collects (numerically) zero probability.
struct degenerate_window_error : std::runtime_error {
    explicit degenerate_window_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rsp

#endif
