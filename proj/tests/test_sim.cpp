#include "doctest.h"
#include "support.hpp"

#include <numeric>

#include "pintan/sim.hpp"

using namespace pintan;

namespace {

std::int64_t balance_of(const AttackReport& r, const std::string& name)
{
    for (const auto& [n, b] : r.final_balances)
        if (n == name)
            return b;
    FAIL("no account " << name);
    return 0;
}

std::int64_t total(const AttackReport& r)
{
    std::int64_t sum = 0;
    for (const auto& [n, b] : r.final_balances)
        sum += b;
    return sum;
}

std::string path_of(const Scenario& s)
{
    try {
        run_scenario(s);
    } catch (const ScenarioInvalid& e) {
        return e.path();
    }
    return "<valid>";
}

} // namespace

TEST_CASE("baseline: kill and steal wins and the victim sees the TAN as used")
{
    const AttackReport r = run_scenario(Scenario::baseline(0));
    CHECK(r.success);
    CHECK(r.stolen_amount == 5000);
    CHECK(r.tan_used_by == TanUser::Attacker);
    CHECK(r.victim.browser_crashed);
    CHECK(r.victim.saw_tan_already_used);
    CHECK(r.metrics.spy_killed_browser);
    REQUIRE(r.metrics.capture_tick);
    REQUIRE(r.metrics.theft_tick);
    CHECK(*r.metrics.theft_tick > *r.metrics.capture_tick);
    CHECK(balance_of(r, "attacker") == 5000);
    CHECK(total(r) == 100000);
}

TEST_CASE("abort lock with a slow robot defeats the attack")
{
    Scenario s = Scenario::baseline(0);
    s.policy.abort_policy = AbortPolicy::lock_account(10);
    s.attacker.robot_latency = TickDistribution::constant(20);
    const AttackReport r = run_scenario(s);
    CHECK_FALSE(r.success);
    CHECK(r.stolen_amount == 0);
    CHECK(balance_of(r, "attacker") == 0);
}

TEST_CASE("session sniper is stopped by Denied")
{
    Scenario s = Scenario::baseline(0);
    s.attacker.mode = AttackMode::SessionSniper;
    s.attacker.robot_latency = TickDistribution::constant(2);
    CHECK(run_scenario(s).success);
    s.policy.concurrent_sessions = ConcurrentSessions::Denied;
    const AttackReport r = run_scenario(s);
    CHECK_FALSE(r.success);
    CHECK(balance_of(r, "attacker") == 0);
}

TEST_CASE("runs are reproducible")
{
    for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
        Scenario s = Scenario::baseline(seed);
        s.behavior = BehaviorProfile::full_confusion();
        s.attacker.spy_tier = SpyTier::FieldAware;
        s.behavior.relogin_delay = TickDistribution::uniform(1, 200);
        const AttackReport a = run_scenario(s);
        const AttackReport b = run_scenario(s);
        CHECK(a.events == b.events);
        CHECK(a.success == b.success);
        CHECK(a.final_balances == b.final_balances);
    }
}

TEST_CASE("race: who presents the TAN first")
{
    Scenario s = Scenario::baseline(3);
    s.attacker.robot_latency = TickDistribution::constant(5);
    s.behavior.relogin_delay = TickDistribution::constant(200);
    CHECK(run_scenario(s).tan_used_by == TanUser::Attacker);

    s.attacker.robot_latency = TickDistribution::constant(400);
    s.behavior.relogin_delay = TickDistribution::constant(1);
    const AttackReport r = run_scenario(s);
    CHECK(r.tan_used_by == TanUser::Victim);
    CHECK_FALSE(r.success);
    CHECK(r.victim.transfer_completed);
    CHECK(balance_of(r, "payee") == 250);
}

TEST_CASE("property: BEN makes no difference to the outcome")
{
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Scenario s = Scenario::baseline(seed);
        s.behavior.relogin_delay = TickDistribution::uniform(1, 30);
        s.attacker.robot_latency = TickDistribution::uniform(1, 30);
        s.policy.ben_enabled = true;
        const AttackReport with = run_scenario(s);
        s.policy.ben_enabled = false;
        const AttackReport without = run_scenario(s);
        CHECK(with.success == without.success);
        CHECK(with.stolen_amount == without.stolen_amount);
    }
}

TEST_CASE("property: adding a mitigation never turns a failure into a success")
{
    for (AttackMode mode : {AttackMode::KillAndSteal, AttackMode::SessionSniper}) {
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            Scenario base = Scenario::baseline(seed);
            base.attacker.mode = mode;
            base.attacker.robot_latency = TickDistribution::uniform(1, 40);
            base.behavior.relogin_delay = TickDistribution::uniform(1, 60);
            const bool flawed = run_scenario(base).success;
            for (int toggle = 0; toggle < 3; ++toggle) {
                Scenario s = base;
                if (toggle == 0)
                    s.policy.abort_policy = AbortPolicy::lock_account(10);
                if (toggle == 1)
                    s.policy.concurrent_sessions = ConcurrentSessions::Denied;
                if (toggle == 2)
                    s.policy.field_names = FieldNaming::PerSessionRandomized;
                if (run_scenario(s).success)
                    CHECK(flawed);
            }
        }
    }
}

TEST_CASE("the browser dies before any TAN leaves it")
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const AttackReport r = run_scenario(Scenario::baseline(seed));
        std::optional<Tick> kill;
        for (const LogEntry& e : r.events) {
            if (e.actor == Actor::Spy && e.event == "kill_browser" && !kill)
                kill = e.tick;
            if (e.actor == Actor::Client && e.event == "submit") {
                const auto env = peek_envelope(e.payload);
                REQUIRE(env);
                if (env->op == "transfer_authorize") {
                    REQUIRE(kill);
                    CHECK(e.tick > *kill);
                }
            }
        }
        CHECK(kill);
    }
}

TEST_CASE("property: the event log is ordered by tick, phase and actor rank")
{
    for (AttackMode mode : {AttackMode::KillAndSteal, AttackMode::SessionSniper, AttackMode::MIM}) {
        Scenario s = Scenario::baseline(5);
        s.attacker.mode = mode;
        const AttackReport r = run_scenario(s);
        REQUIRE_FALSE(r.events.empty());
        auto key = [](const LogEntry& e) {
            return std::tuple(e.tick, e.phase == Phase::Observe ? 0 : 1, phase_rank(e.phase, e.actor));
        };
        for (std::size_t i = 1; i < r.events.size(); ++i)
            REQUIRE(key(r.events[i - 1]) <= key(r.events[i]));
    }
    CHECK(phase_rank(Phase::Observe, Actor::User) < phase_rank(Phase::Observe, Actor::Raider));
    CHECK(phase_rank(Phase::Act, Actor::Raider) < phase_rank(Phase::Act, Actor::Client));
}

TEST_CASE("hops and donation conserve money")
{
    Scenario s = Scenario::baseline(11);
    s.accounts.push_back({"mule1", AccountRole::Compromised, 0, 10, 2, std::nullopt, std::nullopt});
    s.accounts.push_back({"mule2", AccountRole::Compromised, 0, 10, 2, std::nullopt, std::nullopt});
    s.accounts.push_back({"charity", AccountRole::Bystander, 0, 10, 0, std::nullopt, std::nullopt});
    s.attacker.obfuscation_hops = 2;
    s.attacker.donation_fraction = 0.1;
    const AttackReport r = run_scenario(s);
    CHECK(r.success);
    CHECK(r.metrics.donated_amount == 500);
    CHECK(balance_of(r, "charity") == 500);
    CHECK(balance_of(r, "attacker") == 4500);
    CHECK(balance_of(r, "mule1") == 0);
    CHECK(balance_of(r, "mule2") == 0);
    CHECK(total(r) == 100000);

    s.attacker.obfuscation_hops = 3;
    const AttackReport infeasible = run_scenario(s);
    CHECK_FALSE(infeasible.success);
    CHECK(total(infeasible) == 100000);
}

TEST_CASE("invalid scenarios name the offending field")
{
    Scenario s = Scenario::baseline();
    s.accounts[1].balance = -1;
    CHECK(path_of(s) == "accounts[1].balance");

    s = Scenario::baseline();
    s.accounts[2].name = "victim";
    CHECK(path_of(s) == "accounts[2].name");

    s = Scenario::baseline();
    s.accounts[0].pin = "12";
    CHECK(path_of(s) == "accounts[0].pin");

    s = Scenario::baseline();
    s.accounts[2].role = AccountRole::Bystander;
    CHECK(path_of(s) == "accounts");

    s = Scenario::baseline();
    s.intent.to = "nobody";
    CHECK(path_of(s) == "behavior.transfer.to");

    s = Scenario::baseline();
    s.attacker.attacker_account = "payee";
    CHECK(path_of(s) == "attacker.account");

    s = Scenario::baseline();
    s.format.tan_length = 0;
    CHECK(path_of(s) == "target_profile");

    CHECK(path_of(Scenario::baseline()) == "<valid>");
}
