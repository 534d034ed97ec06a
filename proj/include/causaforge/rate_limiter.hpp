#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "causaforge/provider.hpp"

namespace causaforge::extraction {

struct RateBudget {
    std::size_t max_requests_per_minute = 60;
    std::size_t max_tokens_per_minute = 150000;

    void validate() const;
};

using Duration = std::chrono::nanoseconds;
using TimePoint = std::chrono::time_point<std::chrono::steady_clock, Duration>;

class Clock {
public:
    virtual ~Clock() = default;
    virtual TimePoint now() = 0;
    virtual void sleep_until(TimePoint t) = 0;
};

class SteadyClock final : public Clock {
public:
    TimePoint now() override;
    void sleep_until(TimePoint t) override;
};

// Time only moves when someone sleeps; for tests and offline (mock) runs.
class SimulatedClock final : public Clock {
public:
    explicit SimulatedClock(TimePoint start = TimePoint{}) : now_(start) {}
    TimePoint now() override;
    void sleep_until(TimePoint t) override;
    void advance(Duration d);

private:
    std::mutex mu_;
    TimePoint now_;
};

struct Dispatch {
    TimePoint at;
    std::size_t tokens = 0;
};

// Sliding-window gatekeeper: for every half-open window [t, t + 60 s) the
// dispatched request count and token sum stay within the budget. Reservations
// are serialized; dispatch times never decrease.
class SlidingWindowLimiter {
public:
    explicit SlidingWindowLimiter(RateBudget budget, Duration window = std::chrono::seconds(60));

    // Earliest admissible dispatch time >= `earliest`; the slot is recorded.
    TimePoint reserve(std::size_t tokens, TimePoint earliest);

    const std::vector<Dispatch>& log() const { return log_; }
    const RateBudget& budget() const { return budget_; }

private:
    RateBudget budget_;
    Duration window_;
    std::mutex mu_;
    std::deque<Dispatch> live_;
    std::size_t live_tokens_ = 0;
    TimePoint last_{};
    std::vector<Dispatch> log_;
};

struct RetryPolicy {
    int max_retries = 3;
    Duration base_delay = std::chrono::seconds(1);
    double jitter = 0.25;  // fraction of the delay, drawn from `seed`
    std::uint64_t seed = 0;
};

struct SubmitResult {
    std::optional<ProviderResponse> response;
    std::string error;  // set when every attempt failed
    int attempts = 0;
    TimePoint dispatched_at{};  // last attempt

    bool ok() const { return response.has_value(); }
};

// Sends requests in order through the limiter. Each attempt, retries
// included, is charged against the budget. Throws OversizeRequest up front
// if any request alone exceeds the per-minute token budget.
std::vector<SubmitResult> rate_limited_submit(const std::vector<ProviderRequest>& requests,
                                              SlidingWindowLimiter& limiter, Provider& provider, Clock& clock,
                                              const RetryPolicy& retry = {});

// Checks a dispatch log against a budget over every window start; returns
// the first offending window start, if any.
std::optional<TimePoint> find_budget_violation(const std::vector<Dispatch>& log, const RateBudget& budget,
                                               Duration window = std::chrono::seconds(60));

}  // namespace causaforge::extraction
