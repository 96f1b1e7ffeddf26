#include "doctest.h"
#include "support.hpp"

#include "pintan/spy.hpp"

using namespace pintan;
using namespace testsupport;

namespace {

const FormSchema kSchema = BankForms::credential_form();

std::size_t count_if_kind(const std::vector<InputEvent>& events, auto pred)
{
    return static_cast<std::size_t>(std::count_if(events.begin(), events.end(), [&](const InputEvent& e) {
        return pred(e.action);
    }));
}

} // namespace

TEST_CASE("natural profile reproduces the values, contiguously and in order")
{
    const FieldValues v = {{kIdField, "12345678"}, {kPinField, "54321"}, {kTanField, "123456"}};
    const auto events = generate_session_events(BehaviorProfile::natural(), v, kSchema, 1);
    const FormResult r = replay(kSchema, events);
    CHECK(r.fields == v);
    CHECK(r.terminator == Terminator::Enter);
    // the exact stream: digits, Tab, digits, Tab, digits, Enter
    std::string shape;
    for (const auto& e : events)
        shape += std::holds_alternative<key::Char>(e.action) ? std::get<key::Char>(e.action).c
                 : std::holds_alternative<key::Tab>(e.action) ? 'T'
                 : std::holds_alternative<key::Enter>(e.action) ? 'E'
                                                                : '?';
    CHECK(shape == "12345678T54321T123456E");
    CHECK(tokenize_stream(events) == std::vector<std::string>{"12345678", "54321", "123456"});
}

TEST_CASE("ticks start at `start` and advance by one")
{
    const auto events = generate_session_events(BehaviorProfile::full_confusion(),
                                                credential_values(random_credentials(3)), kSchema, 3, 40);
    for (std::size_t i = 0; i < events.size(); ++i)
        CHECK(events[i].tick == 40 + static_cast<Tick>(i));
}

TEST_CASE("full confusion still lands the right values")
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const FieldValues v = credential_values(random_credentials(seed));
        CHECK(replay(kSchema, generate_session_events(BehaviorProfile::full_confusion(), v, kSchema, seed)).fields == v);
    }
}

TEST_CASE("mistypes produce corrections yet replay to the target (1,000 seeds)")
{
    BehaviorProfile p = BehaviorProfile::natural();
    p.mistype_rate = 0.1;
    p.navigation = {1, 0, 1};
    std::size_t backspaces = 0, dels = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const FieldValues v = credential_values(random_credentials(seed));
        const auto events = generate_session_events(p, v, kSchema, seed);
        REQUIRE(replay(kSchema, events).fields == v);
        backspaces += count_if_kind(events, [](const InputAction& a) { return std::holds_alternative<key::Backspace>(a); });
        dels += count_if_kind(events, [](const InputAction& a) { return std::holds_alternative<key::Del>(a); });
    }
    CHECK(backspaces > 0);
    CHECK(dels > 0);
}

TEST_CASE("profile knobs show up in the stream")
{
    const FieldValues v = credential_values(random_credentials(11));
    BehaviorProfile paste = BehaviorProfile::natural();
    paste.paste_prob = 1.0;
    const auto pe = generate_session_events(paste, v, kSchema, 1);
    CHECK(count_if_kind(pe, [](const InputAction& a) { return std::holds_alternative<key::Paste>(a); }) == 3);
    CHECK(tokenize_stream(pe).empty());

    BehaviorProfile mouse = BehaviorProfile::natural();
    mouse.navigation = {0, 1, 0};
    mouse.terminator = {0, 1};
    const auto me = generate_session_events(mouse, v, kSchema, 1);
    CHECK(count_if_kind(me, [](const InputAction& a) { return std::holds_alternative<key::Tab>(a); }) == 0);
    CHECK(std::holds_alternative<key::ClickSubmit>(me.back().action));

    BehaviorProfile bad = BehaviorProfile::natural();
    bad.mistype_rate = 1.5;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = BehaviorProfile::natural();
    bad.navigation = {0, 0, 0};
    CHECK_THROWS_AS(bad.validate(), DomainError);
    CHECK_THROWS_AS(generate_session_events(BehaviorProfile::natural(), {{"nope", "1"}}, kSchema, 1), FormError);
}

TEST_CASE("generation is deterministic in the seed")
{
    const FieldValues v = credential_values(random_credentials(5));
    const auto a = generate_session_events(BehaviorProfile::full_confusion(), v, kSchema, 9);
    CHECK(a == generate_session_events(BehaviorProfile::full_confusion(), v, kSchema, 9));
    CHECK_FALSE(a == generate_session_events(BehaviorProfile::full_confusion(), v, kSchema, 10));
}

TEST_CASE("property: round trip for every profile over 1,000 seeds")
{
    for (const auto& [name, profile] : profile_grid()) {
        CAPTURE(name);
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            const FieldValues v = credential_values(random_credentials(seed));
            REQUIRE(replay(kSchema, generate_session_events(profile, v, kSchema, seed)).fields == v);
        }
    }
}

TEST_CASE("property: natural streams carry each credential as one maximal digit run")
{
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const TrueCredentials c = random_credentials(seed);
        const auto events = generate_session_events(BehaviorProfile::natural(), credential_values(c), kSchema, seed);
        REQUIRE(tokenize_stream(events) == std::vector<std::string>{c.id, c.pin, c.tan});
        REQUIRE_FALSE(std::holds_alternative<key::Char>(events.back().action)); // closed by a non-digit
    }
}

TEST_CASE("victim_reaction")
{
    BehaviorProfile p = BehaviorProfile::natural();
    p.relogin_delay = TickDistribution::constant(50);
    const ReloginPlan plan = victim_reaction(100, p, 1);
    CHECK(plan.relogin_tick == 150);
    CHECK(plan.first_tan == TanChoice::Same);
    p.tan_retry = TanRetry::NextImmediately;
    CHECK(victim_reaction(100, p, 1).first_tan == TanChoice::Next);

    p.relogin_delay = TickDistribution::uniform(10, 20);
    for (std::uint64_t s = 0; s < 200; ++s) {
        const Tick t = victim_reaction(0, p, s).relogin_tick;
        REQUIRE(t >= 10);
        REQUIRE(t <= 20);
    }
    p.relogin_delay = TickDistribution::choice({7, 9});
    for (std::uint64_t s = 0; s < 50; ++s) {
        const Tick t = victim_reaction(0, p, s).relogin_tick;
        REQUIRE((t == 7 || t == 9));
    }
    CHECK_THROWS_AS(TickDistribution::choice({}), DomainError);
}
