#include "doctest.h"
#include "support.hpp"

using namespace pintan;
using testsupport::TanModel;

namespace {

const std::vector<std::string> kValues = {"100001", "100002", "100003", "100004", "100005"};
const std::vector<std::string> kBens = {"200001", "200002", "200003", "200004", "200005"};

TanList five() { return TanList::from_values(kValues, kBens); }

TanRejectReason reason(const ConsumeResult& r) { return std::get<TanRejected>(r).reason; }

} // namespace

TEST_CASE("present t3 under AnyUnused + UsedAndPredecessors")
{
    TanList list = five();
    const ConsumeResult r = consume_tan(list, "100003", {TanAcceptance::AnyUnused, TanInvalidation::UsedAndPredecessors});
    CHECK(r == ConsumeResult{TanAccepted{3, "200003"}});
    CHECK(list.at(1).status == TanStatus::Invalidated);
    CHECK(list.at(2).status == TanStatus::Invalidated);
    CHECK(list.at(3).status == TanStatus::Used);
    CHECK(list.at(4).status == TanStatus::Fresh);
    CHECK(list.at(5).status == TanStatus::Fresh);

    SUBCASE("presenting it again is AlreadyUsed and changes nothing")
    {
        const TanList before = list;
        CHECK(reason(consume_tan(list, "100003", {})) == TanRejectReason::AlreadyUsed);
        CHECK(list == before);
    }
    SUBCASE("an invalidated predecessor is refused")
    {
        CHECK(reason(consume_tan(list, "100001", {})) == TanRejectReason::Invalidated);
    }
}

TEST_CASE("NextOnly refuses a TAN out of order")
{
    TanList list = five();
    const TanList before = list;
    CHECK(reason(consume_tan(list, "100002", {TanAcceptance::NextOnly, TanInvalidation::UsedOnly})) ==
          TanRejectReason::NotNext);
    CHECK(list == before);
    CHECK(std::holds_alternative<TanAccepted>(
        consume_tan(list, "100001", {TanAcceptance::NextOnly, TanInvalidation::UsedOnly})));
    CHECK(list.next_fresh() == 2u);
}

TEST_CASE("UsedOnly leaves predecessors usable")
{
    TanList list = five();
    const TanPolicy p{TanAcceptance::AnyUnused, TanInvalidation::UsedOnly};
    CHECK(std::holds_alternative<TanAccepted>(consume_tan(list, "100004", p)));
    CHECK(list.at(1).status == TanStatus::Fresh);
    CHECK(consume_tan(list, "100001", p) == ConsumeResult{TanAccepted{1, "200001"}});
}

TEST_CASE("the worked-example TAN 123456 is accepted as t1")
{
    TanList list = TanList::from_values({"123456", "234567"}, {"111111", "222222"});
    CHECK(consume_tan(list, "123456", {}) == ConsumeResult{TanAccepted{1, "111111"}});
}

TEST_CASE("unknown values are rejected without side effects")
{
    TanList list = five();
    const TanList before = list;
    CHECK(reason(consume_tan(list, "999999", {})) == TanRejectReason::Unknown);
    CHECK(reason(consume_tan(list, "", {})) == TanRejectReason::Unknown);
    CHECK(list == before);
}

TEST_CASE("TAN list construction invariants")
{
    CHECK_THROWS_AS(TanList::from_values({"111111", "111111"}, {"1", "2"}), DomainError);
    CHECK_THROWS_AS(TanList::from_values({"11a111"}, {"1"}), DomainError);
    CHECK_THROWS_AS(TanList::from_values({"111111"}, {"1", "2"}), DomainError);
    CHECK(TanList::from_values({"111111"}, {}).at(1).ben.empty());
    CHECK_THROWS_AS(TanList({TanEntry{"111111", 2, "1", TanStatus::Fresh}}), DomainError);

    Rng rng(3, "t");
    const TanList g = TanList::generate(200, CredentialFormat{}, rng);
    std::set<std::string> seen;
    for (const TanEntry& e : g.entries()) {
        CHECK(is_digit_string(e.value, 6));
        CHECK(is_digit_string(e.ben, 6));
        CHECK(seen.insert(e.value).second);
    }
    CHECK(g.fresh_count() == 200);
}

TEST_CASE("generation is seed-deterministic")
{
    Rng a(9, "x"), b(9, "x"), c(10, "x");
    CHECK(TanList::generate(20, {}, a) == TanList::generate(20, {}, b));
    CHECK_FALSE(TanList::generate(20, {}, c) == TanList::generate(20, {}, b));
}

TEST_CASE("change_pin")
{
    Credentials cred("12345678", "54321", five());
    SUBCASE("ok, old pin retired")
    {
        CHECK(change_pin(cred, "54321", "11111") == PinChangeResult::Ok);
        CHECK(cred.authenticates("11111"));
        CHECK_FALSE(cred.authenticates("54321"));
        CHECK(change_pin(cred, "54321", "11111") == PinChangeResult::WrongOld);
        CHECK(change_pin(cred, "11111", "54321") == PinChangeResult::Reused);
        CHECK(cred.id() == "12345678");
    }
    SUBCASE("wrong old pin")
    {
        CHECK(change_pin(cred, "00000", "11111") == PinChangeResult::WrongOld);
        CHECK(cred.pin() == "54321");
    }
    SUBCASE("bad format")
    {
        CHECK(change_pin(cred, "54321", "1111") == PinChangeResult::BadFormat);
        CHECK(change_pin(cred, "54321", "1111a") == PinChangeResult::BadFormat);
        CHECK(cred.pin() == "54321");
    }
    CHECK_THROWS_AS(Credentials("1234567", "54321", five()), DomainError);
    CHECK_THROWS_AS(Credentials("12345678", "5432", five()), DomainError);
}

TEST_CASE("property: no double acceptance, no acceptance at or below a used index")
{
    for (const TanPolicy policy : testsupport::all_tan_policies()) {
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            Rng rng(seed, "prop");
            TanList list = TanList::generate(100, {}, rng);
            std::set<std::size_t> accepted;
            std::size_t high = 0;
            for (int i = 0; i < 150; ++i) {
                const std::size_t idx = 1 + rng.below(100);
                const ConsumeResult r = consume_tan(list, list.at(idx).value, policy);
                if (std::holds_alternative<TanAccepted>(r)) {
                    REQUIRE(accepted.insert(idx).second);
                    if (policy.invalidation == TanInvalidation::UsedAndPredecessors)
                        REQUIRE(idx > high);
                    high = std::max(high, idx);
                }
            }
            // statuses agree with what was accepted
            for (std::size_t i = 1; i <= 100; ++i)
                REQUIRE((list.at(i).status == TanStatus::Used) == (accepted.count(i) == 1));
        }
    }
}

TEST_CASE("oracle: every sequence up to length 7 matches the set model (plain enumeration)")
{
    const std::vector<std::string> alphabet = {"100001", "100002", "100003", "100004", "100005", "999999"};
    for (const TanPolicy policy : testsupport::all_tan_policies()) {
        std::size_t sequences = 0;
        std::function<void(TanList, TanModel, int)> walk = [&](TanList list, TanModel model, int depth) {
            ++sequences;
            if (depth == 7)
                return;
            for (std::size_t s = 0; s < alphabet.size(); ++s) {
                TanList l = list;
                TanModel m = model;
                REQUIRE(consume_tan(l, alphabet[s], policy) == m.consume(s < 5 ? s + 1 : 0, policy, kBens));
                for (std::size_t i = 1; i <= 5; ++i)
                    REQUIRE(l.at(i).status == m.status(i, policy));
                walk(std::move(l), std::move(m), depth + 1);
            }
        };
        walk(five(), TanModel{5, {}, 0}, 0);
        CHECK(sequences == 335923); // sum 6^k, k = 0..7
    }
}
