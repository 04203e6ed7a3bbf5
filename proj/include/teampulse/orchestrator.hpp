#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "teampulse/delivery.hpp"
#include "teampulse/feedback.hpp"
#include "teampulse/tasks.hpp"
#include "teampulse/transcript.hpp"

namespace teampulse {

/// Injectable time source so session runs are replayable. `sleep_until`
/// blocks on the real clock and jumps instantly on the simulated one.
class Clock {
public:
    virtual ~Clock() = default;
    virtual Timestamp now() = 0;
    virtual void sleep_until(Timestamp t) = 0;
};

class SystemClock : public Clock {
public:
    Timestamp now() override;
    void sleep_until(Timestamp t) override;
};

class SimulatedClock : public Clock {
public:
    explicit SimulatedClock(Timestamp start) : now_(start) {}
    Timestamp now() override { return now_; }
    void sleep_until(Timestamp t) override {
        if (t > now_) now_ = t;
    }
    void advance(std::chrono::milliseconds d) { now_ += d; }

private:
    Timestamp now_;
};

/// Per-channel progress marker — the timestamp of the newest message a
/// cycle has analyzed — persisted as JSON so restarts never re-analyze
/// old traffic.
class WatermarkStore {
public:
    static WatermarkStore load(const std::string& path);
    void save() const;

    std::optional<Timestamp> watermark(const std::string& channel_id) const;
    void set_watermark(const std::string& channel_id, Timestamp t);

private:
    std::string path_;
    std::map<std::string, Timestamp> marks_;
};

struct ChannelSchedule {
    std::string channel_id;
    std::chrono::seconds interval{600};
};

struct ScheduledRun {
    std::string channel_id;
    bool ran = false;      // a cycle actually executed
    bool skipped = false;  // no messages newer than the watermark
    bool ok = false;
    std::string detail;  // failure reason when !ok
};

/// Runs one feedback cycle for a channel. Receives the channel's watermark
/// (newest message timestamp already analyzed, if any) and returns the
/// newest message timestamp this cycle covered, or nullopt when there was
/// nothing new — that skips the cycle and leaves the watermark in place.
using CycleRunner =
    std::function<std::optional<Timestamp>(const std::string& channel_id,
                                           std::optional<Timestamp> watermark)>;

/// One scheduler tick over every channel. A failing channel is recorded
/// and does not block the others; its watermark stays put so the next tick
/// retries it. The caller drives tick cadence from ChannelSchedule::interval.
std::vector<ScheduledRun> run_scheduled(const std::vector<ChannelSchedule>& schedules,
                                        WatermarkStore& watermarks, Clock& clock,
                                        const CycleRunner& run_cycle);

enum class Condition { control, treatment };
const char* to_string(Condition c);

struct TeamAssignment {
    std::string team_id;  // "team-01", ...
    std::vector<std::string> member_ids;
    Condition condition = Condition::control;
};

/// Seeded, deterministic partition of participants into fixed-size teams
/// with conditions alternated across teams. Throws ConfigError when the
/// roster does not divide evenly, unless allow_remainder drops the
/// leftovers.
std::vector<TeamAssignment> assemble_teams(const std::vector<std::string>& participants,
                                           int team_size, std::uint64_t seed,
                                           bool allow_remainder = false);

struct SessionPlan {
    int team_size = 3;
    int rounds = 3;
    std::chrono::seconds round_duration{600};
    std::chrono::seconds feedback_window{180};
    std::uint64_t seed = 0;
};

enum class RoundPhase { discussing, submitting, scored, feedback, done };
const char* to_string(RoundPhase p);

/// Append-only JSONL audit trail; every record carries the clock time.
class EventLog {
public:
    explicit EventLog(const std::string& path);
    void emit(Clock& clock, const std::string& type,
              const std::map<std::string, std::string>& fields);
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct RoundInputs {
    int round_number = 1;
    const TaskDefinition* task = nullptr;
    Transcript transcript;
    std::optional<RankingSubmission> submission;  // absent: deadline missed
};

struct RoundResult {
    std::vector<RoundPhase> phases;  // in the order they were entered
    std::optional<TaskScore> score;  // absent when unsubmitted or rejected
    std::optional<FeedbackCycle> feedback;  // treatment teams only
    std::optional<DeliveryReport> delivery;
    bool ok = true;
    std::string detail;
};

/// Drives one round through its phases: discussion window, submission,
/// scoring, then — treatment condition only — a feedback cycle inside the
/// feedback window. Control teams go straight from scored to done. Errors
/// in the feedback stage are reported in the result, never thrown.
RoundResult run_round(const TeamAssignment& team, const RoundInputs& inputs,
                      const SessionPlan& plan, Clock& clock, EventLog& log,
                      const std::function<FeedbackCycle(const Transcript&)>& feedback_fn,
                      const std::function<DeliveryReport(const FeedbackCycle&)>& deliver_fn);

}  // namespace teampulse
