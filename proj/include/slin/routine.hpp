#pragma once

#include <coroutine>
#include <exception>
#include <optional>
#include <string>
#include <utility>

#include "slin/history.hpp"

namespace slin {

/// One shared-memory request issued by a process program or a method body.
struct Request {
  enum class Kind { invoke, flip };
  Kind kind = Kind::invoke;
  /// Programs: algorithm object handle. Method bodies: base family index.
  int object = 0;
  /// Method bodies: element of the base family (unbounded arrays).
  std::int64_t element = 0;
  std::string op;
  Payload args;
};

/// A deterministic step machine written as a coroutine: every `co_await`
/// yields one Request and resumes with its response; `co_return` ends it.
class Routine {
 public:
  struct promise_type {
    std::optional<Request> request;
    Payload response;
    std::optional<Payload> result;
    std::exception_ptr error;

    Routine get_return_object() { return Routine(std::coroutine_handle<promise_type>::from_promise(*this)); }
    std::suspend_always initial_suspend() noexcept { return {}; }
    std::suspend_always final_suspend() noexcept { return {}; }
    void return_value(Payload v) { result = std::move(v); }
    void unhandled_exception() { error = std::current_exception(); }
  };

  Routine(Routine&& other) noexcept : handle_(std::exchange(other.handle_, {})) {}
  Routine& operator=(Routine&& other) noexcept {
    if (this != &other) {
      if (handle_) handle_.destroy();
      handle_ = std::exchange(other.handle_, {});
    }
    return *this;
  }
  Routine(const Routine&) = delete;
  Routine& operator=(const Routine&) = delete;
  ~Routine() {
    if (handle_) handle_.destroy();
  }

  /// Runs until the first request or completion.
  void start() { step(); }
  /// Delivers the response to the pending request and runs to the next one.
  void resume(Payload response) {
    handle_.promise().response = std::move(response);
    step();
  }

  bool done() const { return handle_.promise().result.has_value(); }
  const Request& request() const { return *handle_.promise().request; }
  const Payload& result() const { return *handle_.promise().result; }

 private:
  explicit Routine(std::coroutine_handle<promise_type> h) : handle_(h) {}

  void step() {
    auto& p = handle_.promise();
    p.request.reset();
    handle_.resume();
    if (p.error) std::rethrow_exception(p.error);
    if (!p.result && !p.request) throw std::logic_error("routine suspended without a request");
  }

  std::coroutine_handle<promise_type> handle_;
};

struct RequestAwaitable {
  Request request;
  Routine::promise_type* promise = nullptr;

  bool await_ready() const noexcept { return false; }
  void await_suspend(std::coroutine_handle<Routine::promise_type> h) {
    promise = &h.promise();
    promise->request = std::move(request);
  }
  Payload await_resume() { return std::move(promise->response); }
};

/// Program-level invocation on algorithm object `object`.
inline RequestAwaitable invoke(int object, std::string op, Payload args = {}) {
  return {Request{Request::Kind::invoke, object, 0, std::move(op), std::move(args)}};
}

inline RequestAwaitable flip() { return {Request{Request::Kind::flip, 0, 0, "flip", {}}}; }

/// Method-body access to element `element` of base family `family`.
inline RequestAwaitable base(int family, std::int64_t element, std::string op, Payload args = {}) {
  return {Request{Request::Kind::invoke, family, element, std::move(op), std::move(args)}};
}

}  // namespace slin
