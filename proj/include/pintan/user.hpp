#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pintan/domain.hpp"
#include "pintan/formfill.hpp"
#include "pintan/rng.hpp"

namespace pintan {

/// Finite-support tick distribution.
struct TickDistribution {
    enum class Kind { Constant, Uniform, Choice };
    Kind kind = Kind::Constant;
    Tick lo = 0;
    Tick hi = 0;
    std::vector<Tick> choices;

    static TickDistribution constant(Tick v) { return {Kind::Constant, v, v, {}}; }
    static TickDistribution uniform(Tick lo, Tick hi) { return {Kind::Uniform, lo, hi, {}}; }
    static TickDistribution choice(std::vector<Tick> values);

    Tick sample(Rng& rng) const;
    Tick min_value() const;
    Tick max_value() const;

    bool operator==(const TickDistribution&) const = default;
};

enum class FieldOrder { Natural, RandomPermutation };
enum class TanRetry { RetrySameThenNext, NextImmediately };

struct NavigationMix {
    double tab = 1.0;
    double mouse = 0.0;
    double arrows = 0.0;
    bool operator==(const NavigationMix&) const = default;
};

struct TerminatorMix {
    double enter = 1.0;
    double click_submit = 0.0;
    bool operator==(const TerminatorMix&) const = default;
};

/// How a person fills a form. `split_segments` == 1 is left-to-right entry;
/// >= 2 splits each field into that many contiguous pieces entered
/// interleaved with other fields' pieces.
struct BehaviorProfile {
    FieldOrder field_order = FieldOrder::Natural;
    std::size_t split_segments = 1;
    double mistype_rate = 0.0;
    NavigationMix navigation;
    double paste_prob = 0.0;
    TerminatorMix terminator;
    TickDistribution relogin_delay = TickDistribution::constant(50);
    TanRetry tan_retry = TanRetry::RetrySameThenNext;

    /// Schema order, left to right, Tab between fields, Enter at the end.
    static BehaviorProfile natural();
    /// Every confusion tactic switched on.
    static BehaviorProfile full_confusion();

    /// Throws DomainError on out-of-range probabilities or zero weight sums.
    void validate() const;

    bool operator==(const BehaviorProfile&) const = default;
};

using FieldValues = std::map<std::string, std::string>;

/// Event stream that fills `schema` with `values` and then terminates the
/// form. Replaying the result always reproduces `values` exactly; fields
/// absent from `values` stay empty. The first event is stamped `start`, and
/// each following event one tick later.
std::vector<InputEvent> generate_session_events(const BehaviorProfile& profile, const FieldValues& values,
                                                const FormSchema& schema, std::uint64_t seed, Tick start = 0);

enum class TanChoice { Same, Next };

struct ReloginPlan {
    Tick relogin_tick = 0;
    TanChoice first_tan = TanChoice::Same;
};

/// What the victim does after the browser dies.
ReloginPlan victim_reaction(Tick crash_tick, const BehaviorProfile& profile, std::uint64_t seed);

} // namespace pintan
