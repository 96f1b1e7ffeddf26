#include "doctest.h"
#include "support.hpp"

#include "pintan/spy.hpp"

using namespace pintan;
using namespace testsupport;

namespace {

std::vector<InputEvent> stamp(std::vector<InputAction> actions, Tick start = 0)
{
    std::vector<InputEvent> out;
    for (auto& a : actions)
        out.push_back({start++, std::move(a)});
    return out;
}

void type(std::vector<InputAction>& v, const std::string& s)
{
    for (char c : s)
        v.push_back(key::Char{c});
}

const CredentialFormat kFmt{};

} // namespace

TEST_CASE("tokenize_stream")
{
    std::vector<InputAction> a;
    type(a, "1234");
    a.push_back(key::Backspace{});
    type(a, "5678");
    CHECK(tokenize_stream(stamp(a)) == std::vector<std::string>{"1234", "5678"});
    CHECK(tokenize_stream(std::vector<InputEvent>{}).empty());

    std::vector<InputAction> b{key::Paste{"12345678"}, key::Tab{}, key::Char{'x'}};
    type(b, "12");
    CHECK(tokenize_stream(stamp(b)) == std::vector<std::string>{"12"});
    CHECK(tokenize_stream(stamp(b), {true}) == std::vector<std::string>{"12345678", "12"});
}

TEST_CASE("classify_tokens")
{
    SUBCASE("natural order")
    {
        const std::vector<std::string> t{"12345678", "54321", "123456"};
        const auto r = classify_tokens(t, kFmt);
        CHECK(r.status == ExtractionStatus::Complete);
        CHECK(r.matches("12345678", "54321", "123456"));
    }
    SUBCASE("transaction data between PIN and TAN")
    {
        const std::vector<std::string> t{"12345678", "54321", "87654321", "250", "111111"};
        const auto r = classify_tokens(t, kFmt);
        CHECK(r.to_account == "87654321");
        CHECK(r.amount == "250");
        CHECK(r.tan == "111111");
    }
    SUBCASE("split id never forms an id-length token")
    {
        const std::vector<std::string> t{"1234", "54321", "5678", "123456"};
        const auto r = classify_tokens(t, kFmt);
        CHECK(r.status == ExtractionStatus::Incomplete);
        CHECK_FALSE(r.id);
    }
    SUBCASE("pin typed before id is missed")
    {
        const std::vector<std::string> t{"54321", "12345678", "123456"};
        CHECK(classify_tokens(t, kFmt).status == ExtractionStatus::Incomplete);
    }
    SUBCASE("no TAN yet")
    {
        const std::vector<std::string> t{"12345678", "54321"};
        const auto r = classify_tokens(t, kFmt);
        CHECK(r.status == ExtractionStatus::Incomplete);
        CHECK(r.id == "12345678");
        CHECK(r.pin == "54321");
    }
    SUBCASE("equal lengths are ambiguous")
    {
        const std::vector<std::string> t{"111111", "222222", "333333"};
        CHECK(classify_tokens(t, CredentialFormat{6, 6, 6, 6}).status == ExtractionStatus::Ambiguous);
        CHECK(classify_tokens({}, CredentialFormat{6, 6, 6, 6}).status == ExtractionStatus::Incomplete);
    }
}

TEST_CASE("blind vs field-aware on a corrected TAN")
{
    const FormSchema schema = BankForms::credential_form();
    std::vector<InputAction> a;
    type(a, "12345678");
    a.push_back(key::Tab{});
    type(a, "54321");
    a.push_back(key::Tab{});
    type(a, "123457");
    a.push_back(key::Backspace{});
    type(a, "6");
    a.push_back(key::Enter{});
    const auto events = stamp(a);

    const auto blind = classify_tokens(tokenize_stream(events), kFmt);
    CHECK(blind.status == ExtractionStatus::Complete);
    CHECK(blind.tan == "123457");
    CHECK_FALSE(blind.matches("12345678", "54321", "123456"));

    const auto aware = extract_field_aware(events, schema);
    CHECK(aware.matches("12345678", "54321", "123456"));
    CHECK(aware.tan == replay(schema, events)["tan"]);
}

TEST_CASE("split entry defeats the blind tier only")
{
    const FormSchema schema = BankForms::credential_form();
    BehaviorProfile p = BehaviorProfile::natural();
    p.split_segments = 2;
    int blind_hits = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const TrueCredentials c = random_credentials(seed);
        const auto events = generate_session_events(p, credential_values(c), schema, seed);
        blind_hits += classify_tokens(tokenize_stream(events), kFmt).matches(c.id, c.pin, c.tan) ? 1 : 0;
        CHECK(extract_field_aware(events, schema).matches(c.id, c.pin, c.tan));
    }
    // segments occasionally stay adjacent and rejoin into one run
    CHECK(blind_hits < 20);
}

TEST_CASE("field-aware stops at the terminator and needs one")
{
    const FormSchema schema = BankForms::credential_form();
    std::vector<InputAction> a;
    type(a, "12345678");
    a.push_back(key::Tab{});
    type(a, "54321");
    a.push_back(key::Tab{});
    type(a, "123456");
    CHECK(extract_field_aware(stamp(a), schema).status == ExtractionStatus::Incomplete);
    a.push_back(key::Enter{});
    type(a, "999");
    const auto r = extract_field_aware(stamp(a), schema);
    CHECK(r.status == ExtractionStatus::Complete);
    CHECK(r.tan == "123456");
}

TEST_CASE("property: both tiers agree on natural typing (1,000 seeds)")
{
    const FormSchema schema = BankForms::credential_form();
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const TrueCredentials c = random_credentials(seed);
        const auto events = generate_session_events(BehaviorProfile::natural(), credential_values(c), schema, seed);
        const auto blind = classify_tokens(tokenize_stream(events), kFmt);
        const auto aware = extract_field_aware(events, schema);
        REQUIRE(blind.matches(c.id, c.pin, c.tan));
        REQUIRE(aware.matches(c.id, c.pin, c.tan));
    }
}

TEST_CASE("multi-page field-aware extraction")
{
    const BankForms forms = BankForms::standard();
    std::vector<InputAction> login, transfer, tan;
    type(login, "12345678");
    login.push_back(key::Tab{});
    type(login, "54321");
    login.push_back(key::Enter{});
    type(transfer, "87654321");
    transfer.push_back(key::Tab{});
    type(transfer, "250");
    transfer.push_back(key::ClickSubmit{});
    type(tan, "123456");
    const std::vector<PageInput> unfinished{{Page::Login, stamp(login)}, {Page::Transfer, stamp(transfer)},
                                            {Page::Tan, stamp(tan)}};
    CHECK(extract_field_aware(unfinished, forms).status == ExtractionStatus::Incomplete);
    tan.push_back(key::Enter{});
    const std::vector<PageInput> pages{{Page::Login, stamp(login)}, {Page::Transfer, stamp(transfer)},
                                       {Page::Tan, stamp(tan)}};
    const auto r = extract_field_aware(pages, forms);
    CHECK(r.matches("12345678", "54321", "123456"));
    CHECK(r.to_account == "87654321");
    CHECK(r.amount == "250");
}

TEST_CASE("decide_action")
{
    const SpyObservation none{};
    const SpyObservation partial{true, true, false};
    const SpyObservation ready{true, true, true};
    CHECK(decide_action(none, SpyMode::KillAndSteal) == SpyAction::Continue);
    CHECK(decide_action(partial, SpyMode::KillAndSteal) == SpyAction::Continue);
    CHECK(decide_action(SpyObservation{false, true, true}, SpyMode::SessionSniper) == SpyAction::Continue);
    CHECK(decide_action(ready, SpyMode::KillAndSteal) == SpyAction::KillBrowser);
    CHECK(decide_action(ready, SpyMode::SessionSniper) == SpyAction::UseNow);
}

TEST_CASE("Spy fires exactly when the TAN is closed")
{
    const auto profile = TargetBankProfile::standard();
    std::vector<InputAction> login, tan;
    type(login, "12345678");
    login.push_back(key::Tab{});
    type(login, "54321");
    login.push_back(key::Enter{});
    type(tan, "123456");
    tan.push_back(key::Enter{});

    for (SpyTier tier : {SpyTier::Blind, SpyTier::FieldAware}) {
        CAPTURE(to_string(tier));
        Spy spy(tier, profile);
        spy.page_loaded(Page::Login);
        Tick t = 0;
        for (const auto& e : stamp(login, t))
            CHECK_FALSE(spy.observe(e).tan_terminated);
        spy.page_loaded(Page::Tan);
        const auto events = stamp(tan, 100);
        for (std::size_t i = 0; i + 1 < events.size(); ++i)
            CHECK_FALSE(spy.observe(events[i]).tan_terminated);
        const SpyObservation last = spy.observe(events.back());
        CHECK(last.id_captured);
        CHECK(last.pin_captured);
        CHECK(last.tan_terminated);
        CHECK(spy.extraction().matches("12345678", "54321", "123456"));
    }
}

TEST_CASE("profile helpers")
{
    CHECK(TargetBankProfile::standard().lengths_distinct());
    CHECK_FALSE(TargetBankProfile::standard(CredentialFormat{6, 5, 6, 6}).lengths_distinct());
    CHECK(to_string(ExtractionStatus::Ambiguous) == "Ambiguous");
    CHECK(to_string(SpyTier::FieldAware) == "field_aware");
}
