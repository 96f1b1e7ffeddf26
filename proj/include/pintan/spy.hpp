#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pintan/client.hpp"
#include "pintan/domain.hpp"
#include "pintan/formfill.hpp"
#include "pintan/wire.hpp"

namespace pintan {

/// What the attacker knows about the targeted bank before the attack.
struct TargetBankProfile {
    CredentialFormat lengths;
    BankForms forms;
    FieldNameTable field_names = FieldNameTable::static_names(); // robot snapshot

    static TargetBankProfile standard(const CredentialFormat& lengths = {});
    bool lengths_distinct() const;
};

enum class ExtractionStatus { Complete, Incomplete, Ambiguous };
std::string_view to_string(ExtractionStatus s);

struct ExtractionResult {
    std::optional<std::string> id;
    std::optional<std::string> pin;
    std::optional<std::string> tan;
    std::optional<std::string> to_account;
    std::optional<std::string> amount;
    ExtractionStatus status = ExtractionStatus::Incomplete;

    bool has_credentials() const { return id && pin && tan; }
    bool matches(std::string_view true_id, std::string_view true_pin, std::string_view true_tan) const;
    bool operator==(const ExtractionResult&) const = default;
};

struct TokenizerOptions {
    bool clipboard_visible = false;
};

/// Maximal runs of typed digits. Every other event, including editing keys,
/// ends the current run; the blind spy does not interpret editing.
std::vector<std::string> tokenize_stream(std::span<const InputEvent> events, TokenizerOptions options = {});

/// First ID-length token is the ID, the next PIN-length token the PIN, the
/// last TAN-length token after it the TAN.
ExtractionResult classify_tokens(std::span<const std::string> tokens, const CredentialFormat& lengths);

/// Reads the fields as the form does.
ExtractionResult extract_field_aware(std::span<const InputEvent> events, const FormSchema& schema);

struct PageInput {
    Page page = Page::Login;
    std::vector<InputEvent> events;
};
ExtractionResult extract_field_aware(std::span<const PageInput> pages, const BankForms& forms);

enum class SpyMode { KillAndSteal, SessionSniper };
enum class SpyAction { Continue, KillBrowser, UseNow };
enum class SpyTier { Blind, FieldAware };
std::string_view to_string(SpyAction a);
std::string_view to_string(SpyTier t);

struct SpyObservation {
    bool id_captured = false;
    bool pin_captured = false;
    bool tan_terminated = false; // a TAN has just been completed by the current event
};

SpyAction decide_action(const SpyObservation& observed, SpyMode mode);

/// On-host spy fed one input event at a time. The blind tier tokenizes the
/// raw stream; the field-aware tier replays each page's form.
class Spy {
public:
    Spy(SpyTier tier, TargetBankProfile profile, TokenizerOptions options = {});

    void page_loaded(Page page);
    SpyObservation observe(const InputEvent& event);
    ExtractionResult extraction() const;
    SpyTier tier() const { return tier_; }

private:
    SpyObservation observe_blind(const InputEvent& event);
    SpyObservation observe_field_aware(const InputEvent& event);

    SpyTier tier_;
    TargetBankProfile profile_;
    TokenizerOptions options_;

    std::vector<std::string> tokens_;
    std::string run_;

    std::optional<Page> page_;
    std::optional<FormState> form_;
    ExtractionResult fields_;
};

} // namespace pintan
