#include "pintan/spy.hpp"

namespace pintan {

namespace {

bool is_digit(char c)
{
    return c >= '0' && c <= '9';
}

// Digits this event contributes to the current run, or nullopt if the event
// ends the run.
std::optional<std::string_view> digits_of(const InputEvent& e, const TokenizerOptions& options)
{
    if (const auto* k = std::get_if<key::Char>(&e.action); k != nullptr && is_digit(k->c))
        return std::string_view(&k->c, 1);
    if (const auto* p = std::get_if<key::Paste>(&e.action);
        p != nullptr && options.clipboard_visible && !p->text.empty() && is_digit_string(p->text))
        return std::string_view(p->text);
    return std::nullopt;
}

void set_if_present(std::optional<std::string>& slot, const FormResult& form, const char* field)
{
    auto it = form.fields.find(field);
    if (it != form.fields.end() && !it->second.empty())
        slot = it->second;
}

void finish(ExtractionResult& r, bool terminated)
{
    r.status = terminated && r.has_credentials() ? ExtractionStatus::Complete : ExtractionStatus::Incomplete;
}

FormState replay_until_terminator(const FormSchema& schema, std::span<const InputEvent> events)
{
    FormState state(schema);
    for (const InputEvent& e : events) {
        if (state.terminated())
            break;
        state.apply(e);
    }
    return state;
}

} // namespace

TargetBankProfile TargetBankProfile::standard(const CredentialFormat& lengths)
{
    return TargetBankProfile{lengths, BankForms::standard(lengths), FieldNameTable::static_names()};
}

bool TargetBankProfile::lengths_distinct() const
{
    return lengths.id_length != lengths.pin_length && lengths.id_length != lengths.tan_length &&
           lengths.pin_length != lengths.tan_length;
}

std::string_view to_string(ExtractionStatus s)
{
    switch (s) {
    case ExtractionStatus::Complete: return "Complete";
    case ExtractionStatus::Incomplete: return "Incomplete";
    case ExtractionStatus::Ambiguous: return "Ambiguous";
    }
    return "?";
}

std::string_view to_string(SpyAction a)
{
    switch (a) {
    case SpyAction::Continue: return "Continue";
    case SpyAction::KillBrowser: return "KillBrowser";
    case SpyAction::UseNow: return "UseNow";
    }
    return "?";
}

std::string_view to_string(SpyTier t)
{
    return t == SpyTier::Blind ? "blind" : "field_aware";
}

bool ExtractionResult::matches(std::string_view true_id, std::string_view true_pin, std::string_view true_tan) const
{
    return status == ExtractionStatus::Complete && id == true_id && pin == true_pin && tan == true_tan;
}

std::vector<std::string> tokenize_stream(std::span<const InputEvent> events, TokenizerOptions options)
{
    std::vector<std::string> tokens;
    std::string run;
    for (const InputEvent& e : events) {
        if (auto d = digits_of(e, options)) {
            run += *d;
        } else if (!run.empty()) {
            tokens.push_back(std::move(run));
            run.clear();
        }
    }
    if (!run.empty())
        tokens.push_back(std::move(run));
    return tokens;
}

ExtractionResult classify_tokens(std::span<const std::string> tokens, const CredentialFormat& lengths)
{
    ExtractionResult r;
    const bool distinct = lengths.id_length != lengths.pin_length && lengths.id_length != lengths.tan_length &&
                          lengths.pin_length != lengths.tan_length;
    if (!distinct) {
        r.status = tokens.empty() ? ExtractionStatus::Incomplete : ExtractionStatus::Ambiguous;
        return r;
    }

    const std::size_t n = tokens.size();
    std::size_t i = 0;
    while (i < n && tokens[i].size() != lengths.id_length)
        ++i;
    if (i == n)
        return r;
    r.id = tokens[i];
    std::size_t p = i + 1;
    while (p < n && tokens[p].size() != lengths.pin_length)
        ++p;
    if (p == n)
        return r;
    r.pin = tokens[p];

    std::size_t t = n;
    for (std::size_t k = n; k-- > p + 1;) {
        if (tokens[k].size() == lengths.tan_length) {
            t = k;
            break;
        }
    }
    // transaction data sits between the PIN and the TAN
    std::size_t a = p + 1;
    while (a < t && tokens[a].size() != lengths.id_length)
        ++a;
    if (a < t) {
        r.to_account = tokens[a];
        if (a + 1 < t)
            r.amount = tokens[a + 1];
    }
    if (t == n)
        return r;
    r.tan = tokens[t];
    r.status = ExtractionStatus::Complete;
    return r;
}

ExtractionResult extract_field_aware(std::span<const InputEvent> events, const FormSchema& schema)
{
    const FormState state = replay_until_terminator(schema, events);
    const FormResult form = state.result();
    ExtractionResult r;
    set_if_present(r.id, form, kIdField);
    set_if_present(r.pin, form, kPinField);
    set_if_present(r.tan, form, kTanField);
    set_if_present(r.to_account, form, kToField);
    set_if_present(r.amount, form, kAmountField);
    finish(r, state.terminated());
    return r;
}

ExtractionResult extract_field_aware(std::span<const PageInput> pages, const BankForms& forms)
{
    ExtractionResult r;
    for (const PageInput& page : pages) {
        const FormState state = replay_until_terminator(forms.page(page.page), page.events);
        if (!state.terminated())
            continue;
        const FormResult form = state.result();
        set_if_present(r.id, form, kIdField);
        set_if_present(r.pin, form, kPinField);
        set_if_present(r.tan, form, kTanField);
        set_if_present(r.to_account, form, kToField);
        set_if_present(r.amount, form, kAmountField);
    }
    finish(r, true);
    return r;
}

SpyAction decide_action(const SpyObservation& observed, SpyMode mode)
{
    if (!(observed.id_captured && observed.pin_captured && observed.tan_terminated))
        return SpyAction::Continue;
    return mode == SpyMode::KillAndSteal ? SpyAction::KillBrowser : SpyAction::UseNow;
}

Spy::Spy(SpyTier tier, TargetBankProfile profile, TokenizerOptions options)
    : tier_(tier), profile_(std::move(profile)), options_(options)
{}

void Spy::page_loaded(Page page)
{
    page_ = page;
    form_.emplace(profile_.forms.page(page));
}

SpyObservation Spy::observe(const InputEvent& event)
{
    return tier_ == SpyTier::Blind ? observe_blind(event) : observe_field_aware(event);
}

SpyObservation Spy::observe_blind(const InputEvent& event)
{
    bool closed = false;
    if (auto d = digits_of(event, options_)) {
        run_ += *d;
    } else if (!run_.empty()) {
        tokens_.push_back(std::move(run_));
        run_.clear();
        closed = true;
    }
    const ExtractionResult r = classify_tokens(tokens_, profile_.lengths);
    SpyObservation obs;
    obs.id_captured = r.id.has_value();
    obs.pin_captured = r.pin.has_value();
    obs.tan_terminated = closed && r.tan.has_value() && tokens_.back().size() == profile_.lengths.tan_length;
    return obs;
}

SpyObservation Spy::observe_field_aware(const InputEvent& event)
{
    SpyObservation obs;
    if (form_ && !form_->terminated()) {
        try {
            form_->apply(event);
        } catch (const FormError&) {
            // not a form we can follow; keep what we have
        }
        if (form_->terminated()) {
            const FormResult form = form_->result();
            set_if_present(fields_.id, form, kIdField);
            set_if_present(fields_.pin, form, kPinField);
            set_if_present(fields_.to_account, form, kToField);
            set_if_present(fields_.amount, form, kAmountField);
            if (page_ == Page::Tan) {
                set_if_present(fields_.tan, form, kTanField);
                obs.tan_terminated = fields_.tan.has_value();
            }
        }
    }
    obs.id_captured = fields_.id.has_value();
    obs.pin_captured = fields_.pin.has_value();
    return obs;
}

ExtractionResult Spy::extraction() const
{
    if (tier_ == SpyTier::Blind)
        return classify_tokens(tokens_, profile_.lengths);
    ExtractionResult r = fields_;
    finish(r, true);
    return r;
}

} // namespace pintan
