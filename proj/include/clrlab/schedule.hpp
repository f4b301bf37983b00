#pragma once

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

namespace clrlab {

struct ConstantLr {
    double lr = 0.0;
    friend bool operator==(const ConstantLr&, const ConstantLr&) = default;
};

/// initial_lr * factor^(number of milestones <= iter). The milestone
/// iteration itself already uses the dropped rate.
struct StepDecay {
    double initial_lr = 0.0;
    double factor = 0.1;
    std::vector<std::uint64_t> milestones;
    friend bool operator==(const StepDecay&, const StepDecay&) = default;
};

/// Triangular cyclical rate: min at iter 0, max at iter == stepsize, back to
/// min at 2 * stepsize, repeating.
struct Triangular {
    double min_lr = 0.0;
    double max_lr = 0.0;
    std::uint64_t stepsize = 1;
    friend bool operator==(const Triangular&, const Triangular&) = default;
};

/// Linear sweep from start_lr (iter 0) to end_lr (iter total_iters).
struct LinearRange {
    double start_lr = 0.0;
    double end_lr = 0.0;
    std::uint64_t total_iters = 1;
    friend bool operator==(const LinearRange&, const LinearRange&) = default;
};

using ScheduleSpec = std::variant<ConstantLr, StepDecay, Triangular, LinearRange>;

/// "constant", "step", "triangular" or "range".
std::string_view schedule_kind(const ScheduleSpec& spec);

/// Throws ConfigError describing the first violated invariant.
void validate(const ScheduleSpec& spec);

/// Learning rate at `iter`. The result is rounded to 15 significant decimal
/// digits, so rates built from decimal bounds land exactly on the decimal
/// value (0.35 * 0.1 gives the double nearest 0.035, not 0.034999...).
/// LinearRange throws ConfigError for iter > total_iters.
double lr_at(const ScheduleSpec& spec, std::uint64_t iter);

/// Round to the nearest double of the 15-significant-digit decimal form.
double round_decimal15(double x);

}  // namespace clrlab
