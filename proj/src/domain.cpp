#include "pintan/domain.hpp"

#include <algorithm>
#include <set>

namespace pintan {

bool is_digit_string(std::string_view s)
{
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool is_digit_string(std::string_view s, std::size_t length)
{
    return s.size() == length && is_digit_string(s);
}

std::string random_digits(Rng& rng, std::size_t length)
{
    std::string out(length, '0');
    for (char& c : out)
        c = rng.digit();
    return out;
}

std::string_view to_string(TanStatus s)
{
    switch (s) {
    case TanStatus::Fresh: return "Fresh";
    case TanStatus::Used: return "Used";
    case TanStatus::Invalidated: return "Invalidated";
    }
    return "?";
}

std::string_view to_string(TanAcceptance a)
{
    return a == TanAcceptance::NextOnly ? "NextOnly" : "AnyUnused";
}

std::string_view to_string(TanInvalidation i)
{
    return i == TanInvalidation::UsedOnly ? "UsedOnly" : "UsedAndPredecessors";
}

std::string_view to_string(TanRejectReason r)
{
    switch (r) {
    case TanRejectReason::AlreadyUsed: return "AlreadyUsed";
    case TanRejectReason::Invalidated: return "Invalidated";
    case TanRejectReason::NotNext: return "NotNext";
    case TanRejectReason::Unknown: return "Unknown";
    }
    return "?";
}

std::string_view to_string(PinChangeResult r)
{
    switch (r) {
    case PinChangeResult::Ok: return "Ok";
    case PinChangeResult::WrongOld: return "WrongOld";
    case PinChangeResult::BadFormat: return "BadFormat";
    case PinChangeResult::Reused: return "Reused";
    }
    return "?";
}

TanList::TanList(std::vector<TanEntry> entries) : entries_(std::move(entries))
{
    std::set<std::string_view> seen;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const TanEntry& e = entries_[i];
        if (e.index != i + 1)
            throw DomainError("TAN list indices must be 1-based and consecutive");
        if (!is_digit_string(e.value) || e.value.empty())
            throw DomainError("TAN value must be a non-empty digit string");
        if (!seen.insert(e.value).second)
            throw DomainError("duplicate TAN value " + e.value);
    }
}

TanList TanList::from_values(std::vector<std::string> values, std::vector<std::string> bens)
{
    if (!bens.empty() && bens.size() != values.size())
        throw DomainError("BEN count does not match TAN count");
    std::vector<TanEntry> entries;
    entries.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        entries.push_back({std::move(values[i]), i + 1, bens.empty() ? std::string{} : std::move(bens[i]),
                           TanStatus::Fresh});
    return TanList(std::move(entries));
}

TanList TanList::generate(std::size_t count, const CredentialFormat& format, Rng& rng)
{
    std::set<std::string> used;
    std::vector<std::string> values;
    values.reserve(count);
    while (values.size() < count) {
        std::string v = random_digits(rng, format.tan_length);
        if (used.insert(v).second)
            values.push_back(std::move(v));
    }
    std::vector<std::string> bens;
    bens.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        bens.push_back(random_digits(rng, format.ben_length));
    return from_values(std::move(values), std::move(bens));
}

std::size_t TanList::fresh_count() const
{
    return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(),
                                                  [](const TanEntry& e) { return e.status == TanStatus::Fresh; }));
}

const TanEntry* TanList::find(std::string_view value) const
{
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const TanEntry& e) { return e.value == value; });
    return it == entries_.end() ? nullptr : &*it;
}

const TanEntry& TanList::at(std::size_t index) const
{
    if (index == 0 || index > entries_.size())
        throw std::out_of_range("TAN index out of range");
    return entries_[index - 1];
}

std::optional<std::size_t> TanList::next_fresh() const
{
    for (const TanEntry& e : entries_)
        if (e.status == TanStatus::Fresh)
            return e.index;
    return std::nullopt;
}

ConsumeResult TanList::consume(std::string_view presented, TanPolicy policy)
{
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const TanEntry& e) { return e.value == presented; });
    if (it == entries_.end())
        return TanRejected{TanRejectReason::Unknown};
    if (it->status == TanStatus::Used)
        return TanRejected{TanRejectReason::AlreadyUsed};
    if (it->status == TanStatus::Invalidated)
        return TanRejected{TanRejectReason::Invalidated};
    if (policy.acceptance == TanAcceptance::NextOnly && next_fresh() != it->index)
        return TanRejected{TanRejectReason::NotNext};

    it->status = TanStatus::Used;
    if (policy.invalidation == TanInvalidation::UsedAndPredecessors) {
        for (auto p = entries_.begin(); p != it; ++p)
            if (p->status == TanStatus::Fresh)
                p->status = TanStatus::Invalidated;
    }
    return TanAccepted{it->index, it->ben};
}

ConsumeResult consume_tan(TanList& list, std::string_view presented, TanPolicy policy)
{
    return list.consume(presented, policy);
}

Credentials::Credentials(std::string id, std::string pin, TanList tans, CredentialFormat format)
    : id_(std::move(id)), pin_(std::move(pin)), tans_(std::move(tans)), format_(format)
{
    if (!is_digit_string(id_, format_.id_length))
        throw DomainError("ID must be " + std::to_string(format_.id_length) + " digits");
    if (!is_digit_string(pin_, format_.pin_length))
        throw DomainError("PIN must be " + std::to_string(format_.pin_length) + " digits");
}

Credentials Credentials::generate(std::string id, const CredentialFormat& format, std::size_t tan_count, Rng& rng)
{
    std::string pin = random_digits(rng, format.pin_length);
    TanList tans = TanList::generate(tan_count, format, rng);
    return Credentials(std::move(id), std::move(pin), std::move(tans), format);
}

PinChangeResult Credentials::change_pin(std::string_view old_pin, std::string_view new_pin)
{
    if (old_pin != pin_)
        return PinChangeResult::WrongOld;
    if (!is_digit_string(new_pin, format_.pin_length))
        return PinChangeResult::BadFormat;
    if (new_pin == pin_ || std::find(retired_pins_.begin(), retired_pins_.end(), new_pin) != retired_pins_.end())
        return PinChangeResult::Reused;
    retired_pins_.push_back(pin_);
    pin_ = std::string(new_pin);
    return PinChangeResult::Ok;
}

} // namespace pintan
