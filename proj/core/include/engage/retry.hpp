#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>

#include "engage/error.hpp"

namespace engage {

/// Shared retry and rate-limit contract for every remote source.
struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{1000};
  double backoff_factor = 2.0;
  std::set<int> throttle_status_codes{429};

  /// Throws MalformedInput when the invariants do not hold.
  void validate() const;

  /// Delay slept before retry number `retry` (1 = first retry).
  std::chrono::milliseconds delay_before_retry(int retry) const;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Sleeper that blocks the calling thread.
Sleeper thread_sleeper();

// A source call ends in exactly one of these.
struct Throttled {
  std::optional<std::chrono::seconds> retry_after;
};
struct TransientFailure {
  std::string reason;
};
struct AuthRejected {
  std::string reason;
};

template <class T>
using Reply = std::variant<T, Throttled, TransientFailure, AuthRejected>;

/// Runs `call` until it yields a value. Throttles and transient failures are
/// retried with exponential backoff; AuthRejected is raised immediately as
/// AuthFailure. After `max_attempts` calls, SourceUnavailable is raised.
template <class T, class Call>
T call_with_retry(const RetryPolicy& policy, const Sleeper& sleep,
                  std::string_view what, Call&& call) {
  std::string last_reason = "no attempt made";
  for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
    if (attempt > 1) {
      auto delay = policy.delay_before_retry(attempt - 1);
      if (sleep) sleep(delay);
    }
    Reply<T> reply = call();
    if (auto* value = std::get_if<T>(&reply)) return std::move(*value);
    if (auto* auth = std::get_if<AuthRejected>(&reply)) {
      throw AuthFailure(std::string(what) + ": " + auth->reason);
    }
    if (std::holds_alternative<Throttled>(reply)) {
      last_reason = "throttled";
    } else {
      last_reason = std::get<TransientFailure>(reply).reason;
    }
  }
  throw SourceUnavailable(std::string(what) + ": retry budget exhausted after " +
                          std::to_string(policy.max_attempts) + " attempts (" +
                          last_reason + ")");
}

}  // namespace engage
