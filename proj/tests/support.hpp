// Shared test oracles and generators.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <tuple>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pintan/client.hpp"
#include "pintan/domain.hpp"
#include "pintan/formfill.hpp"
#include "pintan/rng.hpp"
#include "pintan/user.hpp"

namespace testsupport {

using namespace pintan;

// Set-of-spent-indices plus high-water-mark model of a TAN list.
struct TanModel {
    std::size_t size = 0;
    std::set<std::size_t> spent;
    std::size_t high_water = 0;

    // index 0 means "value not on the list"
    ConsumeResult consume(std::size_t index, TanPolicy policy, const std::vector<std::string>& bens)
    {
        if (index == 0 || index > size)
            return TanRejected{TanRejectReason::Unknown};
        const bool predecessors = policy.invalidation == TanInvalidation::UsedAndPredecessors;
        if (spent.count(index))
            return TanRejected{TanRejectReason::AlreadyUsed};
        if (predecessors && index < high_water)
            return TanRejected{TanRejectReason::Invalidated};
        if (policy.acceptance == TanAcceptance::NextOnly) {
            std::size_t next = 0;
            for (std::size_t i = 1; i <= size; ++i) {
                if (!spent.count(i) && !(predecessors && i < high_water)) {
                    next = i;
                    break;
                }
            }
            if (index != next)
                return TanRejected{TanRejectReason::NotNext};
        }
        spent.insert(index);
        high_water = std::max(high_water, index);
        return TanAccepted{index, bens[index - 1]};
    }

    TanStatus status(std::size_t index, TanPolicy policy) const
    {
        if (spent.count(index))
            return TanStatus::Used;
        if (policy.invalidation == TanInvalidation::UsedAndPredecessors && index < high_water)
            return TanStatus::Invalidated;
        return TanStatus::Fresh;
    }

    bool operator<(const TanModel& o) const
    {
        return std::tie(spent, high_water) < std::tie(o.spent, o.high_water);
    }
};

inline std::vector<TanPolicy> all_tan_policies()
{
    return {{TanAcceptance::AnyUnused, TanInvalidation::UsedAndPredecessors},
            {TanAcceptance::AnyUnused, TanInvalidation::UsedOnly},
            {TanAcceptance::NextOnly, TanInvalidation::UsedAndPredecessors},
            {TanAcceptance::NextOnly, TanInvalidation::UsedOnly}};
}

// Second, independent text-box model used to cross-check FormState.
class FormOracle {
public:
    explicit FormOracle(const FormSchema& schema)
    {
        for (std::size_t i = 0; i < schema.size(); ++i)
            ids_.push_back(schema.at(i).id);
        boxes_.assign(ids_.size(), "");
    }

    // returns false once the form has been submitted
    bool feed(const InputAction& a)
    {
        if (done_)
            return false;
        std::string* box = boxes_.empty() ? nullptr : &boxes_[field_];
        if (auto* c = std::get_if<key::Char>(&a)) {
            if (box) {
                *box = box->substr(0, pos_) + c->c + box->substr(pos_);
                ++pos_;
            }
        } else if (auto* p = std::get_if<key::Paste>(&a)) {
            if (box) {
                *box = box->substr(0, pos_) + p->text + box->substr(pos_);
                pos_ += p->text.size();
            }
        } else if (std::holds_alternative<key::Backspace>(a)) {
            if (box && pos_ > 0) {
                *box = box->substr(0, pos_ - 1) + box->substr(pos_);
                --pos_;
            }
        } else if (std::holds_alternative<key::Del>(a)) {
            if (box && pos_ < box->size())
                *box = box->substr(0, pos_) + box->substr(pos_ + 1);
        } else if (std::holds_alternative<key::ArrowLeft>(a)) {
            pos_ = pos_ == 0 ? 0 : pos_ - 1;
        } else if (std::holds_alternative<key::ArrowRight>(a)) {
            if (box)
                pos_ = std::min(pos_ + 1, box->size());
        } else if (std::holds_alternative<key::Tab>(a) || std::holds_alternative<key::Backtab>(a)) {
            if (!boxes_.empty()) {
                const std::size_t n = boxes_.size();
                field_ = std::holds_alternative<key::Tab>(a) ? (field_ + 1) % n : (field_ + n - 1) % n;
                pos_ = boxes_[field_].size();
            }
        } else if (auto* m = std::get_if<key::MouseFocus>(&a)) {
            for (std::size_t i = 0; i < ids_.size(); ++i)
                if (ids_[i] == m->field_id)
                    field_ = i;
            pos_ = m->cursor ? std::min(*m->cursor, boxes_[field_].size()) : boxes_[field_].size();
        } else if (std::holds_alternative<key::Enter>(a)) {
            done_ = true;
            term_ = Terminator::Enter;
        } else if (std::holds_alternative<key::ClickSubmit>(a)) {
            done_ = true;
            term_ = Terminator::Submit;
        }
        return true;
    }

    std::map<std::string, std::string> fields() const
    {
        std::map<std::string, std::string> m;
        for (std::size_t i = 0; i < ids_.size(); ++i)
            m[ids_[i]] = boxes_[i];
        return m;
    }
    Terminator terminator() const { return term_; }

private:
    std::vector<std::string> ids_;
    std::vector<std::string> boxes_;
    std::size_t field_ = 0;
    std::size_t pos_ = 0;
    bool done_ = false;
    Terminator term_ = Terminator::None;
};

// Random but well-formed stream: ends at the first terminator, if any.
inline std::vector<InputEvent> random_stream(const FormSchema& schema, std::uint64_t seed, std::size_t max_len = 40)
{
    Rng rng(seed, "test/stream");
    const std::size_t len = rng.below(max_len + 1);
    std::vector<InputEvent> out;
    Tick t = 0;
    for (std::size_t i = 0; i < len; ++i) {
        t += static_cast<Tick>(rng.below(3));
        InputAction a;
        switch (rng.below(12)) {
        case 0: case 1: case 2: a = key::Char{static_cast<char>('0' + rng.below(10))}; break;
        case 3: a = key::Char{static_cast<char>('a' + rng.below(26))}; break;
        case 4: a = key::Tab{}; break;
        case 5: a = key::Backtab{}; break;
        case 6: a = key::Backspace{}; break;
        case 7: a = key::Del{}; break;
        case 8: a = rng.chance(0.5) ? InputAction{key::ArrowLeft{}} : InputAction{key::ArrowRight{}}; break;
        case 9: {
            key::MouseFocus m{schema.at(rng.below(schema.size())).id, std::nullopt};
            if (rng.chance(0.7))
                m.cursor = rng.below(10);
            a = m;
            break;
        }
        case 10: a = key::Paste{random_digits(rng, 1 + rng.below(6))}; break;
        default:
            if (rng.chance(0.15))
                a = rng.chance(0.5) ? InputAction{key::Enter{}} : InputAction{key::ClickSubmit{}};
            else
                a = key::Char{static_cast<char>('0' + rng.below(10))};
        }
        out.push_back({t, a});
        if (std::holds_alternative<key::Enter>(a) || std::holds_alternative<key::ClickSubmit>(a))
            break;
    }
    return out;
}

// A grid of behavior profiles covering each knob on its own and combined.
inline std::vector<std::pair<std::string, BehaviorProfile>> profile_grid()
{
    std::vector<std::pair<std::string, BehaviorProfile>> grid;
    grid.emplace_back("natural", BehaviorProfile::natural());
    grid.emplace_back("full_confusion", BehaviorProfile::full_confusion());
    BehaviorProfile p = BehaviorProfile::natural();
    p.field_order = FieldOrder::RandomPermutation;
    grid.emplace_back("permuted", p);
    p = BehaviorProfile::natural();
    p.split_segments = 3;
    grid.emplace_back("split3", p);
    p = BehaviorProfile::natural();
    p.mistype_rate = 0.1;
    grid.emplace_back("mistype", p);
    p.navigation = {0, 0, 1};
    grid.emplace_back("mistype_arrows", p);
    p = BehaviorProfile::natural();
    p.navigation = {0, 1, 0};
    p.terminator = {0, 1};
    grid.emplace_back("mouse_submit", p);
    p = BehaviorProfile::natural();
    p.paste_prob = 1.0;
    grid.emplace_back("paste_all", p);
    p = BehaviorProfile::full_confusion();
    p.split_segments = 4;
    p.mistype_rate = 0.3;
    p.paste_prob = 0.5;
    grid.emplace_back("heavy", p);
    return grid;
}

struct TrueCredentials {
    std::string id, pin, tan;
};

inline TrueCredentials random_credentials(std::uint64_t seed, const CredentialFormat& fmt = {})
{
    Rng rng(seed, "test/credentials");
    return {random_digits(rng, fmt.id_length), random_digits(rng, fmt.pin_length), random_digits(rng, fmt.tan_length)};
}

inline FieldValues credential_values(const TrueCredentials& c)
{
    return {{kIdField, c.id}, {kPinField, c.pin}, {kTanField, c.tan}};
}

} // namespace testsupport
