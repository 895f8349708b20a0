#pragma once

#include <cstddef>
#include <mutex>
#include <string>
#include <vector>

namespace dds {

/// Deterministic byte accounting of live solver structures. Every major
/// buffer is charged on allocation and credited on release; the peak is
/// tracked globally and per phase.
class MemoryLedger {
 public:
  void begin_phase(const std::string& name);
  void charge(std::size_t bytes);
  void release(std::size_t bytes);

  std::size_t current() const;
  std::size_t peak() const;
  /// Phase with the largest peak (first on ties); empty if no phase began.
  std::string peak_phase() const;

  struct Phase {
    std::string name;
    std::size_t peak = 0;
  };
  std::vector<Phase> phases() const;

 private:
  mutable std::mutex mu_;
  std::size_t current_ = 0;
  std::size_t peak_ = 0;
  std::vector<Phase> phases_;
};

}  // namespace dds
