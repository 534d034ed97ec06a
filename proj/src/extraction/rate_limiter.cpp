#include "causaforge/rate_limiter.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "causaforge/errors.hpp"
#include "causaforge/rng.hpp"

namespace causaforge::extraction {

void RateBudget::validate() const {
    if (max_requests_per_minute == 0 || max_tokens_per_minute == 0)
        throw InvalidArgument("rate budget limits must be positive");
}

TimePoint SteadyClock::now() { return std::chrono::time_point_cast<Duration>(std::chrono::steady_clock::now()); }

void SteadyClock::sleep_until(TimePoint t) { std::this_thread::sleep_until(t); }

TimePoint SimulatedClock::now() {
    std::lock_guard lock(mu_);
    return now_;
}

void SimulatedClock::sleep_until(TimePoint t) {
    std::lock_guard lock(mu_);
    now_ = std::max(now_, t);
}

void SimulatedClock::advance(Duration d) {
    std::lock_guard lock(mu_);
    now_ += d;
}

SlidingWindowLimiter::SlidingWindowLimiter(RateBudget budget, Duration window) : budget_(budget), window_(window) {
    budget_.validate();
}

TimePoint SlidingWindowLimiter::reserve(std::size_t tokens, TimePoint earliest) {
    if (tokens > budget_.max_tokens_per_minute)
        throw OversizeRequest("request estimates " + std::to_string(tokens) + " tokens; budget is " +
                              std::to_string(budget_.max_tokens_per_minute) + " per minute");
    std::lock_guard lock(mu_);
    TimePoint t = std::max(earliest, last_);
    for (;;) {
        while (!live_.empty() && live_.front().at + window_ <= t) {
            live_tokens_ -= live_.front().tokens;
            live_.pop_front();
        }
        if (live_.size() + 1 <= budget_.max_requests_per_minute &&
            live_tokens_ + tokens <= budget_.max_tokens_per_minute)
            break;
        t = live_.front().at + window_;
    }
    live_.push_back({t, tokens});
    live_tokens_ += tokens;
    last_ = t;
    log_.push_back({t, tokens});
    return t;
}

std::vector<SubmitResult> rate_limited_submit(const std::vector<ProviderRequest>& requests,
                                              SlidingWindowLimiter& limiter, Provider& provider, Clock& clock,
                                              const RetryPolicy& retry) {
    for (const auto& r : requests) {
        if (r.token_estimate == 0) throw InvalidArgument("request token_estimate must be positive");
        if (r.token_estimate > limiter.budget().max_tokens_per_minute)
            throw OversizeRequest("request estimates " + std::to_string(r.token_estimate) +
                                  " tokens; budget is " + std::to_string(limiter.budget().max_tokens_per_minute) +
                                  " per minute");
    }

    Rng jitter_rng(retry.seed);
    std::vector<SubmitResult> results;
    results.reserve(requests.size());
    for (const auto& request : requests) {
        SubmitResult result;
        for (int attempt = 0; attempt <= retry.max_retries; ++attempt) {
            result.dispatched_at = limiter.reserve(request.token_estimate, clock.now());
            clock.sleep_until(result.dispatched_at);
            ++result.attempts;
            try {
                result.response = provider.complete(request);
                result.error.clear();
                break;
            } catch (const ProviderError& e) {
                result.error = e.what();
            }
            if (attempt == retry.max_retries) break;
            const double factor = std::ldexp(1.0, attempt) * (1.0 + retry.jitter * (2.0 * jitter_rng.uniform() - 1.0));
            const auto delay = std::chrono::duration_cast<Duration>(retry.base_delay * factor);
            clock.sleep_until(clock.now() + delay);
        }
        if (!result.response)
            result.error = "provider exhausted after " + std::to_string(result.attempts) + " attempts: " + result.error;
        results.push_back(std::move(result));
    }
    return results;
}

std::optional<TimePoint> find_budget_violation(const std::vector<Dispatch>& log, const RateBudget& budget,
                                               Duration window) {
    std::vector<Dispatch> sorted = log;
    std::stable_sort(sorted.begin(), sorted.end(), [](const Dispatch& a, const Dispatch& b) { return a.at < b.at; });
    // The busiest window can always be slid right until it starts at a dispatch.
    std::size_t hi = 0;
    std::size_t tokens = 0;
    for (std::size_t lo = 0; lo < sorted.size(); ++lo) {
        if (hi < lo) {
            hi = lo;
            tokens = 0;
        }
        while (hi < sorted.size() && sorted[hi].at < sorted[lo].at + window) tokens += sorted[hi++].tokens;
        if (hi - lo > budget.max_requests_per_minute || tokens > budget.max_tokens_per_minute) return sorted[lo].at;
        tokens -= sorted[lo].tokens;
    }
    return std::nullopt;
}

}  // namespace causaforge::extraction
