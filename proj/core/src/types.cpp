#include "peer/types.hpp"

#include <iostream>
#include <mutex>

namespace peer {

void log_warning(const std::string& message) {
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << "[peer] warning: " << message << "\n";
}

}  // namespace peer
