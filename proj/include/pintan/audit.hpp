#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pintan/bank.hpp"

namespace pintan {

enum class Probe {
    StaticFieldNames,
    ConcurrentSessions,
    LoginReplay,
    TanTransactionBinding,
    AbortKeepsTan,
    ClearTextCredentials,
};
inline constexpr std::size_t kProbeCount = 6;

std::string_view to_string(Probe p);
std::optional<Probe> probe_from_string(std::string_view s);
/// Execution order. AbortKeepsTan may lock the account, so it runs after
/// the other bank probes; ClearTextCredentials never touches the bank.
const std::vector<Probe>& probe_order();

enum class Verdict { Vulnerable, NotVulnerable, Inconclusive };
std::string_view to_string(Verdict v);

struct ProbeResult {
    Probe probe = Probe::StaticFieldNames;
    Verdict verdict = Verdict::Inconclusive;
    std::string reason;
    std::vector<std::string> transcript; // "-> request" / "<- response" lines
};

struct FlawReport {
    std::vector<ProbeResult> results; // in execution order
    std::optional<Verdict> verdict(Probe p) const;
    const ProbeResult* find(Probe p) const;
};

/// A disposable account: its TANs must all be unused, in list order.
struct AuditCredentials {
    std::string id;
    std::string pin;
    std::vector<std::string> tans;
    CredentialFormat format;
};

struct AuditOptions {
    Tick start = 0;
    Tick abort_wait_ticks = 60;
    std::optional<Probe> only;
};

/// Black-box probes through the wire protocol. The audit clock advances one
/// tick per request. Every transfer it makes is a self-transfer.
FlawReport run_probes(Bank& bank, const AuditCredentials& credentials, const AuditOptions& options = {});

std::string flaw_report_json(const FlawReport& report, int indent = 2);
std::string flaw_report_text(const FlawReport& report);

struct Scenario;

/// Audits a fresh bank running the scenario's policy, with a disposable
/// account shaped like the scenario's victim.
FlawReport audit_scenario(const Scenario& scenario, const AuditOptions& options = {});

} // namespace pintan
