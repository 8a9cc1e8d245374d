// SPDX-License-Identifier: Apache-2.0
#include "genomagent/agent/dispatch.hpp"

#include <future>
#include <memory>
#include <semaphore>
#include <thread>

namespace genomagent {

Result<std::vector<SourceOutcome>> dispatch(const WorkflowConfig& config,
                                            const EntityMap& entities,
                                            const SourceRunner& runner,
                                            const DispatchOptions& options) {
  if (config.sources.empty()) {
    return make_error(Errc::InvalidArgument, "workflow has no sources");
  }
  for (const SourceSpec& spec : config.sources) {
    for (const std::string& name : template_placeholders(spec)) {
      if (!entities.contains(name)) {
        return make_error(Errc::InvalidArgument,
                          "placeholder {" + name + "} is not bindable from the question");
      }
    }
  }

  const std::size_t count = config.sources.size();
  auto slots = std::make_shared<std::counting_semaphore<>>(
      std::max(1, options.parallelism));
  auto shared_entities = std::make_shared<const EntityMap>(entities);

  std::vector<std::future<Result<ApiResponse>>> futures;
  futures.reserve(count);

  for (std::size_t i = 0; i < count; ++i) {
    auto spec = std::make_shared<const SourceSpec>(config.sources[i]);
    auto outer = std::make_shared<std::promise<Result<ApiResponse>>>();
    futures.push_back(outer->get_future());

    std::thread([slots, spec, shared_entities, outer, runner,
                 timeout = options.per_source_timeout]() {
      slots->acquire();

      // The runner itself may block; a watchdog future bounds the wait. On
      // timeout the inner thread is abandoned with its own owned state.
      auto inner = std::make_shared<std::promise<Result<ApiResponse>>>();
      auto inner_future = inner->get_future();
      std::thread([inner, spec, shared_entities, runner]() {
        try {
          inner->set_value(runner(*spec, *shared_entities));
        } catch (const std::exception& e) {
          inner->set_value(make_error(Errc::HttpError, std::string("source threw: ") + e.what()));
        } catch (...) {
          inner->set_value(make_error(Errc::HttpError, "source threw"));
        }
      }).detach();

      if (inner_future.wait_for(timeout) == std::future_status::ready) {
        outer->set_value(inner_future.get());
      } else {
        outer->set_value(make_error(Errc::Timeout, "source timed out"));
      }
      slots->release();
    }).detach();
  }

  std::vector<SourceOutcome> outcomes;
  outcomes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    outcomes.push_back(SourceOutcome{i, config.sources[i].source, futures[i].get()});
  }
  return outcomes;
}

bool all_sources_failed(const std::vector<SourceOutcome>& outcomes) {
  for (const SourceOutcome& outcome : outcomes) {
    if (outcome.response.ok()) return false;
  }
  return true;
}

}  // namespace genomagent
