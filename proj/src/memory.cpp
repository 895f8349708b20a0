#include "ddsolver/memory.hpp"

#include <algorithm>

#include "ddsolver/common.hpp"

namespace dds {

void MemoryLedger::begin_phase(const std::string& name) {
  std::lock_guard lock(mu_);
  phases_.push_back({name, current_});
}

void MemoryLedger::charge(std::size_t bytes) {
  std::lock_guard lock(mu_);
  current_ += bytes;
  peak_ = std::max(peak_, current_);
  if (!phases_.empty()) phases_.back().peak = std::max(phases_.back().peak, current_);
}

void MemoryLedger::release(std::size_t bytes) {
  std::lock_guard lock(mu_);
  require(bytes <= current_, ErrorCode::kInternal, "memory ledger underflow");
  current_ -= bytes;
}

std::size_t MemoryLedger::current() const {
  std::lock_guard lock(mu_);
  return current_;
}

std::size_t MemoryLedger::peak() const {
  std::lock_guard lock(mu_);
  return peak_;
}

std::string MemoryLedger::peak_phase() const {
  std::lock_guard lock(mu_);
  const Phase* best = nullptr;
  for (const auto& p : phases_)
    if (!best || p.peak > best->peak) best = &p;
  return best ? best->name : std::string();
}

std::vector<MemoryLedger::Phase> MemoryLedger::phases() const {
  std::lock_guard lock(mu_);
  return phases_;
}

}  // namespace dds
