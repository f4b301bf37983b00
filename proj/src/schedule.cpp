#include "clrlab/schedule.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <string>

#include "clrlab/error.hpp"

namespace clrlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void require_rate(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError(std::string("schedule ") + name + " must be a finite rate > 0");
    }
}

}  // namespace

std::string_view schedule_kind(const ScheduleSpec& spec) {
    return std::visit(overloaded{
                          [](const ConstantLr&) { return std::string_view("constant"); },
                          [](const StepDecay&) { return std::string_view("step"); },
                          [](const Triangular&) { return std::string_view("triangular"); },
                          [](const LinearRange&) { return std::string_view("range"); },
                      },
                      spec);
}

void validate(const ScheduleSpec& spec) {
    std::visit(overloaded{
                   [](const ConstantLr& s) {
                       // lr = 0 is allowed for constant schedules (frozen-weights runs).
                       if (!(s.lr >= 0.0) || !std::isfinite(s.lr)) {
                           throw ConfigError("schedule lr must be finite and >= 0");
                       }
                   },
                   [](const StepDecay& s) {
                       require_rate(s.initial_lr, "initial_lr");
                       if (!(s.factor > 0.0 && s.factor < 1.0)) {
                           throw ConfigError("schedule factor must lie in (0, 1)");
                       }
                       for (std::size_t i = 1; i < s.milestones.size(); ++i) {
                           if (s.milestones[i] <= s.milestones[i - 1]) {
                               throw ConfigError("schedule milestones must be strictly ascending");
                           }
                       }
                   },
                   [](const Triangular& s) {
                       require_rate(s.min_lr, "min_lr");
                       require_rate(s.max_lr, "max_lr");
                       if (!(s.min_lr < s.max_lr)) {
                           throw ConfigError("schedule min_lr must be < max_lr");
                       }
                       if (s.stepsize < 1) throw ConfigError("schedule stepsize must be >= 1");
                   },
                   [](const LinearRange& s) {
                       require_rate(s.start_lr, "start_lr");
                       require_rate(s.end_lr, "end_lr");
                       if (s.total_iters < 1) throw ConfigError("schedule total_iters must be >= 1");
                   },
               },
               spec);
}

double round_decimal15(double x) {
    if (!std::isfinite(x) || x == 0.0) return x;
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 15);
    double out = x;
    std::from_chars(buf.data(), res.ptr, out);
    return out;
}

double lr_at(const ScheduleSpec& spec, std::uint64_t iter) {
    const double rate = std::visit(
        overloaded{
            [](const ConstantLr& s) { return s.lr; },
            [iter](const StepDecay& s) {
                auto drops = std::upper_bound(s.milestones.begin(), s.milestones.end(), iter) -
                             s.milestones.begin();
                double lr = s.initial_lr;
                for (std::ptrdiff_t k = 0; k < drops; ++k) lr *= s.factor;
                return drops == 0 ? lr : round_decimal15(lr);
            },
            [iter](const Triangular& s) {
                const std::uint64_t cycle = 2 * s.stepsize;
                const std::uint64_t p = iter % cycle;
                // Descending half uses (2s - p) / s, the exact mirror of the ascending half.
                const std::uint64_t rise = p <= s.stepsize ? p : cycle - p;
                if (rise == 0) return s.min_lr;
                if (rise == s.stepsize) return s.max_lr;
                const double frac = static_cast<double>(rise) / static_cast<double>(s.stepsize);
                const double lr = round_decimal15(s.min_lr + (s.max_lr - s.min_lr) * frac);
                return std::clamp(lr, s.min_lr, s.max_lr);
            },
            [iter](const LinearRange& s) {
                if (iter > s.total_iters) {
                    throw ConfigError("iteration " + std::to_string(iter) +
                                      " is beyond the range schedule's total_iters " +
                                      std::to_string(s.total_iters));
                }
                if (iter == 0) return s.start_lr;
                if (iter == s.total_iters) return s.end_lr;
                const double frac = static_cast<double>(iter) / static_cast<double>(s.total_iters);
                const double lr = round_decimal15(s.start_lr + (s.end_lr - s.start_lr) * frac);
                return std::clamp(lr, std::min(s.start_lr, s.end_lr), std::max(s.start_lr, s.end_lr));
            },
        },
        spec);
    return rate;
}

}  // namespace clrlab
