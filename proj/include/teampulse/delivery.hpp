#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "teampulse/feedback.hpp"

namespace teampulse {

struct DeliveryTarget {
    enum class Kind { channel_public, member_private };
    Kind kind = Kind::channel_public;
    std::string channel_id;
    std::string member_id;  // required for member_private
};

struct OutboundMessage {
    DeliveryTarget target;
    std::string body;  // markdown, preserved from the model
    bool mention_all = false;
    std::vector<std::string> mentions;  // member ids, expanded by the adapter
};

struct SendOutcome {
    bool ok = false;
    std::string detail;  // transport detail on failure
};

/// Platform seam. Adapters must either be safe for concurrent sends or be
/// used serially (the dry-run adapter is serial).
class ChatAdapter {
public:
    virtual ~ChatAdapter() = default;
    virtual SendOutcome send(const OutboundMessage& msg) = 0;
    virtual std::string name() const = 0;
    /// Platform-specific escaping of reserved control sequences.
    virtual std::string escape(const std::string& body) const { return body; }
};

/// Where a team's messages go.
struct Routing {
    std::string channel_id;
};

/// Builds the outbound form: public channel target with all-member mentions
/// for team messages, private target for individual ones.
OutboundMessage format_outbound(const FeedbackMessage& msg, const Routing& routing,
                                const std::vector<Member>& members);

/// Re-delivery guard: one key per (cycle id, audience).
class DeliveryLedger {
public:
    bool already_sent(const std::string& key) const { return sent_.contains(key); }
    void mark_sent(const std::string& key) { sent_.insert(key); }

private:
    std::set<std::string> sent_;
};

struct DeliveryReport {
    struct Entry {
        std::string audience;  // "team" or "member:<id>"
        DeliveryTarget::Kind kind;
        bool ok = false;
        bool skipped_duplicate = false;
        std::string detail;
    };
    std::vector<Entry> entries;
    bool all_ok() const {
        for (const auto& e : entries)
            if (!e.ok && !e.skipped_duplicate) return false;
        return true;
    }
};

/// Delivers the team message first (public, all-member mentions), then each
/// individual message privately. Per-message transport failures leave the
/// others unaffected. Messages failing validation are skipped unless
/// deliver_invalid is set.
DeliveryReport deliver(const std::vector<FeedbackMessage>& msgs, const Routing& routing,
                       const std::vector<Member>& members, ChatAdapter& adapter,
                       DeliveryLedger& ledger, const std::string& cycle_id,
                       bool deliver_invalid = false);

/// Writes messages as files under a directory; zero network calls.
class DryRunAdapter : public ChatAdapter {
public:
    explicit DryRunAdapter(std::string dir) : dir_(std::move(dir)) {}
    SendOutcome send(const OutboundMessage& msg) override;
    std::string name() const override { return "dry-run"; }

private:
    std::string dir_;
    int seq_ = 0;
};

/// Generic incoming webhook: POST {target, text, mentions[]} as JSON.
class WebhookAdapter : public ChatAdapter {
public:
    explicit WebhookAdapter(std::string url) : url_(std::move(url)) {}
    SendOutcome send(const OutboundMessage& msg) override;
    std::string name() const override { return "webhook"; }

private:
    std::string url_;
};

/// Workspace chat API: channel post + private delivery (ephemeral-style by
/// default, direct messages optionally) with a bot token from the
/// environment.
class WorkspaceApiAdapter : public ChatAdapter {
public:
    enum class PrivateMode { ephemeral, direct_message };

    WorkspaceApiAdapter(std::string base_url, std::string token_env,
                        PrivateMode mode = PrivateMode::ephemeral)
        : base_url_(std::move(base_url)), token_env_(std::move(token_env)), mode_(mode) {}
    SendOutcome send(const OutboundMessage& msg) override;
    std::string name() const override { return "workspace-api"; }
    std::string escape(const std::string& body) const override;

private:
    std::string base_url_;
    std::string token_env_;
    PrivateMode mode_;
};

}  // namespace teampulse
