#pragma once

#include <stdexcept>
#include <string>

namespace mbt {

/// Base class for all toolkit errors.
struct mbt_error : std::runtime_error {
    explicit mbt_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct non_positive_weight : mbt_error {
    explicit non_positive_weight(const std::string& msg) : mbt_error(msg) {}
};

struct self_loop : mbt_error {
    explicit self_loop(const std::string& msg) : mbt_error(msg) {}
};

struct conflicting_duplicate_edge : mbt_error {
    explicit conflicting_duplicate_edge(const std::string& msg) : mbt_error(msg) {}
};

struct empty_result : mbt_error {
    explicit empty_result(const std::string& msg) : mbt_error(msg) {}
};

struct wrong_mode : mbt_error {
    explicit wrong_mode(const std::string& msg) : mbt_error(msg) {}
};

struct disconnected : mbt_error {
    explicit disconnected(const std::string& msg) : mbt_error(msg) {}
};

struct probability_overflow : mbt_error {
    explicit probability_overflow(const std::string& msg) : mbt_error(msg) {}
};

struct domain_error : mbt_error {
    explicit domain_error(const std::string& msg) : mbt_error(msg) {}
};

struct label_count_mismatch : mbt_error {
    explicit label_count_mismatch(const std::string& msg) : mbt_error(msg) {}
};

struct convergence_failure : mbt_error {
    explicit convergence_failure(const std::string& msg) : mbt_error(msg) {}
};

struct budget_unreachable : mbt_error {
    explicit budget_unreachable(const std::string& msg) : mbt_error(msg) {}
};

struct duplicate_points : mbt_error {
    explicit duplicate_points(const std::string& msg) : mbt_error(msg) {}
};

struct non_positive_proximity : mbt_error {
    explicit non_positive_proximity(const std::string& msg) : mbt_error(msg) {}
};

struct parse_error : mbt_error {
    explicit parse_error(const std::string& msg) : mbt_error(msg) {}
};

}  // namespace mbt
