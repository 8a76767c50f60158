#include "engage/retry.hpp"

#include <cmath>
#include <thread>

namespace engage {

void RetryPolicy::validate() const {
  if (max_attempts < 1) throw MalformedInput("retry policy: max_attempts must be >= 1");
  if (base_delay.count() < 0) throw MalformedInput("retry policy: negative base_delay");
  if (!(backoff_factor > 1.0)) throw MalformedInput("retry policy: backoff_factor must be > 1");
}

std::chrono::milliseconds RetryPolicy::delay_before_retry(int retry) const {
  double scaled = static_cast<double>(base_delay.count()) *
                  std::pow(backoff_factor, static_cast<double>(retry - 1));
  return std::chrono::milliseconds{static_cast<long long>(std::llround(scaled))};
}

Sleeper thread_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

}  // namespace engage
