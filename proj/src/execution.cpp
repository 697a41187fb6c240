#include "pide/execution.hpp"

#include <algorithm>
#include <exception>

namespace pide::document {

class Executor::Context final : public ExecutionContext {
 public:
  Context(Executor& executor, ExecId exec) : executor_(executor), exec_(exec) {}

  bool cancelled() const override {
    if (executor_.cancelled(exec_)) observed_ = true;
    return observed_;
  }

  bool emit(text::ByteRange range, markup::Tree markup) override {
    if (!executor_.emit(exec_, range, std::move(markup))) observed_ = true;
    return !observed_;
  }

  /// The payload saw the cancellation, so its reports may be incomplete.
  bool observed_cancel() const { return observed_; }

 private:
  Executor& executor_;
  ExecId exec_;
  mutable bool observed_ = false;
};

SpanProcessor lexical_processor(const lexer::KeywordTable& keywords) {
  return [&keywords](std::string_view source, ExecutionContext& context) {
    lexer::Lexer lexer(source, keywords);
    while (auto token = lexer.next()) {
      auto m = lexer::markup_of(*token);
      if (!m) continue;
      if (context.cancelled() || !context.emit(m->range, std::move(m->tree))) return;
    }
  };
}

Executor::Executor(std::size_t workers, SpanProcessor processor, ReportSink sink)
    : processor_(std::move(processor)), sink_(std::move(sink)) {
  workers = std::max<std::size_t>(workers, 1);
  workers_.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i) workers_.emplace_back([this] { worker_loop(); });
}

Executor::~Executor() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
    for (auto& [id, record] : records_) record.cancel_requested = true;
  }
  changed_.notify_all();
  for (auto& t : workers_) t.join();
}

ExecId Executor::create(std::shared_ptr<const Command> command) {
  std::lock_guard lock(mutex_);
  const ExecId exec{next_exec_++};
  records_.emplace(exec, Record{std::move(command)});
  return exec;
}

bool Executor::reusable(ExecId exec) const {
  std::lock_guard lock(mutex_);
  const auto it = records_.find(exec);
  return it != records_.end() && !it->second.cancel_requested &&
         it->second.state != ExecState::cancelled;
}

std::optional<ExecState> Executor::state(ExecId exec) const {
  std::lock_guard lock(mutex_);
  const auto it = records_.find(exec);
  if (it == records_.end()) return std::nullopt;
  return it->second.state;
}

void Executor::schedule(std::vector<std::pair<std::string, std::vector<ExecId>>> plan) {
  {
    std::lock_guard lock(mutex_);
    queues_.clear();
    for (auto& [node, execs] : plan) {
      std::deque<ExecId> queue;
      for (const auto exec : execs) {
        const auto it = records_.find(exec);
        if (it != records_.end() && it->second.state == ExecState::pending) queue.push_back(exec);
      }
      if (!queue.empty()) queues_[node] = std::move(queue);
    }
    paused_ = false;
  }
  changed_.notify_all();
}

void Executor::discontinue() {
  std::lock_guard lock(mutex_);
  paused_ = true;
}

void Executor::cancel() {
  std::lock_guard lock(mutex_);
  paused_ = true;
  for (auto& [id, record] : records_)
    if (record.state == ExecState::running) record.cancel_requested = true;
}

void Executor::reclaim(std::span<const ExecId> execs) {
  {
    std::lock_guard lock(mutex_);
    for (const auto exec : execs) {
      const auto it = records_.find(exec);
      if (it == records_.end()) continue;
      // A running record is erased by its worker when the processor returns.
      if (it->second.state == ExecState::running) {
        it->second.cancel_requested = true;
        it->second.reclaimed = true;
      } else {
        records_.erase(it);
      }
      for (auto& [node, queue] : queues_) std::erase(queue, exec);
    }
  }
  changed_.notify_all();
}

std::size_t Executor::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

bool Executor::runnable_locked(std::string& node, ExecId& exec) {
  if (paused_) return false;
  for (auto it = queues_.begin(); it != queues_.end();) {
    auto& queue = it->second;
    while (!queue.empty()) {
      const auto rec = records_.find(queue.front());
      if (rec != records_.end() && rec->second.state == ExecState::pending) break;
      queue.pop_front();
    }
    if (queue.empty()) {
      it = queues_.erase(it);
      continue;
    }
    if (!busy_nodes_.contains(it->first)) {
      node = it->first;
      exec = queue.front();
      queue.pop_front();
      return true;
    }
    ++it;
  }
  return false;
}

bool Executor::idle_locked() const {
  if (running_ > 0) return false;
  if (paused_) return true;
  for (const auto& [node, queue] : queues_)
    for (const auto exec : queue) {
      const auto it = records_.find(exec);
      if (it != records_.end() && it->second.state == ExecState::pending) return false;
    }
  return true;
}

void Executor::wait_idle() const {
  std::unique_lock lock(mutex_);
  changed_.wait(lock, [this] { return idle_locked(); });
}

void Executor::worker_loop() {
  std::unique_lock lock(mutex_);
  while (true) {
    std::string node;
    ExecId exec{};
    changed_.wait(lock, [&] { return stopping_ || runnable_locked(node, exec); });
    if (stopping_) return;

    auto& record = records_.at(exec);
    record.state = ExecState::running;
    auto command = record.command;
    busy_nodes_.insert(node);
    ++running_;
    lock.unlock();

    Context context(*this, exec);
    try {
      processor_(command->source, context);
    } catch (const std::exception& e) {
      std::string message = e.what();
      std::replace_if(message.begin(), message.end(),
                      [](char c) { return c == '\x05' || c == '\x06' || c == '\0'; }, '?');
      context.emit({0, command->source.size()},
                   markup::Tree::elem("error", {{"message", message}}));
    }

    lock.lock();
    --running_;
    busy_nodes_.erase(node);
    if (auto it = records_.find(exec); it != records_.end()) {
      if (it->second.reclaimed)
        records_.erase(it);
      else if (context.observed_cancel())
        it->second.state = ExecState::cancelled;
      else {
        // A cancel that arrived after the last checkpoint left the results
        // complete.
        it->second.state = ExecState::finished;
        it->second.cancel_requested = false;
      }
    }
    changed_.notify_all();
  }
}

bool Executor::cancelled(ExecId exec) const {
  std::lock_guard lock(mutex_);
  const auto it = records_.find(exec);
  return it == records_.end() || it->second.cancel_requested;
}

bool Executor::emit(ExecId exec, text::ByteRange range, markup::Tree markup) {
  std::lock_guard lock(mutex_);
  const auto it = records_.find(exec);
  if (it == records_.end() || it->second.cancel_requested) return false;
  sink_(Report{exec, range, std::move(markup)});
  return true;
}

}  // namespace pide::document
