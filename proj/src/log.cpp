#include <iostream>
#include <mutex>

#include "csvor/common.hpp"

namespace csvor {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

WarningSink& sink_slot() {
  static WarningSink sink;
  return sink;
}

}  // namespace

void set_warning_sink(WarningSink sink) {
  std::lock_guard<std::mutex> lock(sink_mutex());
  sink_slot() = std::move(sink);
}

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(sink_mutex());
  if (sink_slot()) {
    sink_slot()(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

ScopedWarningSink::ScopedWarningSink(WarningSink sink) {
  std::lock_guard<std::mutex> lock(sink_mutex());
  previous_ = std::move(sink_slot());
  sink_slot() = std::move(sink);
}

ScopedWarningSink::~ScopedWarningSink() {
  std::lock_guard<std::mutex> lock(sink_mutex());
  sink_slot() = std::move(previous_);
}

}  // namespace csvor
