#include "pintan/user.hpp"

#include <algorithm>
#include <array>

namespace pintan {

TickDistribution TickDistribution::choice(std::vector<Tick> values)
{
    if (values.empty())
        throw DomainError("choice distribution needs at least one value");
    TickDistribution d;
    d.kind = Kind::Choice;
    d.lo = *std::min_element(values.begin(), values.end());
    d.hi = *std::max_element(values.begin(), values.end());
    d.choices = std::move(values);
    return d;
}

Tick TickDistribution::sample(Rng& rng) const
{
    switch (kind) {
    case Kind::Constant: return lo;
    case Kind::Uniform: return rng.between(lo, hi);
    case Kind::Choice: return choices[rng.below(choices.size())];
    }
    return lo;
}

Tick TickDistribution::min_value() const
{
    return std::min(lo, hi);
}

Tick TickDistribution::max_value() const
{
    return std::max(lo, hi);
}

BehaviorProfile BehaviorProfile::natural()
{
    return BehaviorProfile{};
}

BehaviorProfile BehaviorProfile::full_confusion()
{
    BehaviorProfile p;
    p.field_order = FieldOrder::RandomPermutation;
    p.split_segments = 2;
    p.mistype_rate = 0.1;
    p.navigation = {1.0, 1.0, 1.0};
    p.paste_prob = 0.2;
    p.terminator = {1.0, 1.0};
    return p;
}

void BehaviorProfile::validate() const
{
    auto prob = [](double p, const char* what) {
        if (!(p >= 0.0 && p <= 1.0))
            throw DomainError(std::string(what) + " must be in [0,1]");
    };
    prob(mistype_rate, "mistype_rate");
    prob(paste_prob, "paste_prob");
    auto weights = [](std::initializer_list<double> ws, const char* what) {
        double sum = 0.0;
        for (double w : ws) {
            if (!(w >= 0.0))
                throw DomainError(std::string(what) + " weights must be non-negative");
            sum += w;
        }
        if (!(sum > 0.0))
            throw DomainError(std::string(what) + " weights must not all be zero");
    };
    weights({navigation.tab, navigation.mouse, navigation.arrows}, "navigation");
    weights({terminator.enter, terminator.click_submit}, "terminator");
    if (split_segments < 1)
        throw DomainError("split_segments must be >= 1");
    if (relogin_delay.min_value() < 0)
        throw DomainError("relogin delay must be non-negative");
}

namespace {

struct Segment {
    std::size_t field = 0;
    std::size_t offset = 0;
    std::string text;
    bool paste = false;
};

enum class Nav { Tab, Mouse, Arrows };

class EventWriter {
public:
    EventWriter(const BehaviorProfile& profile, const FormSchema& schema, Rng& rng, Tick start)
        : profile_(profile), form_(schema), rng_(rng), tick_(start)
    {}

    void emit(InputAction action)
    {
        events_.push_back({tick_++, std::move(action)});
        form_.apply(events_.back());
    }

    Nav pick_nav()
    {
        const std::array<double, 3> w{profile_.navigation.tab, profile_.navigation.mouse,
                                      profile_.navigation.arrows};
        return static_cast<Nav>(rng_.pick_weighted(w));
    }

    void navigate(std::size_t field, std::size_t pos)
    {
        const FormSchema& schema = form_.schema();
        if (form_.focus() == field && form_.cursor() == pos)
            return;
        const Nav nav = pick_nav();
        if (nav == Nav::Mouse) {
            const bool at_end = pos == form_.content(field).size();
            // a plain click lands at the end of the content
            if (at_end && rng_.chance(0.5))
                emit(key::MouseFocus{schema.at(field).id, std::nullopt});
            else
                emit(key::MouseFocus{schema.at(field).id, pos});
            return;
        }
        if (form_.focus() != field) {
            const std::size_t n = schema.size();
            const std::size_t cur = form_.focus().value_or(0);
            const std::size_t fwd = (field + n - cur) % n;
            const std::size_t back = (cur + n - field) % n;
            if (back < fwd)
                for (std::size_t i = 0; i < back; ++i)
                    emit(key::Backtab{});
            else
                for (std::size_t i = 0; i < fwd; ++i)
                    emit(key::Tab{});
        }
        while (form_.cursor() > pos)
            emit(key::ArrowLeft{});
        while (form_.cursor() < pos)
            emit(key::ArrowRight{});
    }

    void type(char c)
    {
        if (rng_.chance(profile_.mistype_rate)) {
            char wrong = c;
            while (wrong == c)
                wrong = rng_.digit();
            emit(key::Char{wrong});
            const double total = profile_.navigation.tab + profile_.navigation.mouse + profile_.navigation.arrows;
            if (rng_.chance(profile_.navigation.arrows / total)) {
                emit(key::ArrowLeft{});
                emit(key::Del{});
            } else {
                emit(key::Backspace{});
            }
        }
        emit(key::Char{c});
    }

    std::vector<InputEvent> take() { return std::move(events_); }

private:
    const BehaviorProfile& profile_;
    FormState form_;
    Rng& rng_;
    Tick tick_;
    std::vector<InputEvent> events_;
};

std::vector<Segment> split_field(std::size_t field, const std::string& value, std::size_t k, Rng& rng)
{
    k = std::min(k, value.size());
    std::vector<std::size_t> cuts;
    if (k > 1) {
        std::vector<std::size_t> candidates;
        for (std::size_t i = 1; i < value.size(); ++i)
            candidates.push_back(i);
        rng.shuffle(candidates);
        cuts.assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k - 1));
        std::sort(cuts.begin(), cuts.end());
    }
    cuts.push_back(value.size());
    std::vector<Segment> out;
    std::size_t begin = 0;
    for (std::size_t end : cuts) {
        out.push_back({field, begin, value.substr(begin, end - begin), false});
        begin = end;
    }
    return out;
}

} // namespace

std::vector<InputEvent> generate_session_events(const BehaviorProfile& profile, const FieldValues& values,
                                                const FormSchema& schema, std::uint64_t seed, Tick start)
{
    profile.validate();
    Rng rng(seed, "user/events");

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < schema.size(); ++i) {
        auto it = values.find(schema.at(i).id);
        if (it != values.end() && !it->second.empty())
            order.push_back(i);
    }
    for (const auto& [id, v] : values)
        if (!schema.index_of(id))
            throw FormError("value for unknown field " + id);
    if (profile.field_order == FieldOrder::RandomPermutation)
        rng.shuffle(order);

    // Per-field queues of pieces, in the order they will be entered.
    std::vector<std::vector<Segment>> queues;
    for (std::size_t field : order) {
        const std::string& value = values.at(schema.at(field).id);
        if (rng.chance(profile.paste_prob)) {
            queues.push_back({Segment{field, 0, value, true}});
            continue;
        }
        auto pieces = split_field(field, value, profile.split_segments, rng);
        if (profile.field_order == FieldOrder::RandomPermutation)
            rng.shuffle(pieces);
        queues.push_back(std::move(pieces));
    }

    std::vector<Segment> plan;
    if (profile.split_segments <= 1) {
        for (auto& q : queues)
            for (auto& s : q)
                plan.push_back(std::move(s));
    } else {
        // random merge, weighted by remaining pieces
        std::vector<std::size_t> heads(queues.size(), 0);
        std::size_t remaining = 0;
        for (const auto& q : queues)
            remaining += q.size();
        while (remaining > 0) {
            std::uint64_t r = rng.below(remaining);
            for (std::size_t q = 0; q < queues.size(); ++q) {
                const std::size_t left = queues[q].size() - heads[q];
                if (r < left) {
                    plan.push_back(std::move(queues[q][heads[q]++]));
                    break;
                }
                r -= left;
            }
            --remaining;
        }
    }

    EventWriter out(profile, schema, rng, start);
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> entered(schema.size()); // (offset, length)
    for (const Segment& seg : plan) {
        std::size_t pos = 0;
        for (const auto& [offset, length] : entered[seg.field])
            if (offset < seg.offset)
                pos += length;
        out.navigate(seg.field, pos);
        if (seg.paste) {
            out.emit(key::Paste{seg.text});
        } else {
            for (char c : seg.text)
                out.type(c);
        }
        entered[seg.field].emplace_back(seg.offset, seg.text.size());
    }

    const std::array<double, 2> term{profile.terminator.enter, profile.terminator.click_submit};
    if (rng.pick_weighted(term) == 0)
        out.emit(key::Enter{});
    else
        out.emit(key::ClickSubmit{});
    return out.take();
}

ReloginPlan victim_reaction(Tick crash_tick, const BehaviorProfile& profile, std::uint64_t seed)
{
    Rng rng(seed, "user/relogin");
    ReloginPlan plan;
    plan.relogin_tick = crash_tick + profile.relogin_delay.sample(rng);
    plan.first_tan = profile.tan_retry == TanRetry::RetrySameThenNext ? TanChoice::Same : TanChoice::Next;
    return plan;
}

} // namespace pintan
