// Copyright 2026 The TaskForge Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <pthread.h>
#include <sched.h>

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "taskforge/deps/dependency_engine.hpp"
#include "taskforge/platform.hpp"
#include "taskforge/runtime/config.hpp"
#include "taskforge/runtime/object_pool.hpp"
#include "taskforge/sched/scheduler.hpp"
#include "taskforge/task.hpp"
#include "taskforge/trace/trace_buffer.hpp"

namespace taskforge {

struct TraceStats {
	std::uint64_t emitted = 0;
	std::uint64_t persisted = 0;
	std::uint64_t dropped = 0;
	std::size_t failed_workers = 0;
};

//! What a run left behind. A clean run has no live objects, no pending
//! messages and no access that missed its terminal state.
struct RunReport {
	std::uint64_t tasks_executed = 0;
	std::int64_t live_tasks = 0;
	std::int64_t live_domains = 0;
	std::uint64_t nonterminal_accesses = 0;
	std::uint64_t pending_messages = 0;
	deps::DependencyAuditSnapshot audit;
	sched::SchedulerStats scheduler;
	TraceStats trace;
	std::uint64_t wall_ns = 0;

	bool clean() const noexcept
	{
		return live_tasks == 0 && live_domains == 0 && nonterminal_accesses == 0
			&& pending_messages == 0;
	}
};

class Runtime;

namespace detail {

//! Per-thread state of a worker. Touched only by its own thread, except the
//! announced epoch.
struct alignas(cache_line_size) Worker {
	struct Retired {
		Task *task;
		std::uint64_t epoch;
	};

	Worker(Runtime &rt, std::size_t worker_id) : runtime(rt), id(worker_id) {}

	Runtime &runtime;
	std::size_t id;
	Task *current = nullptr;
	deps::MailBox mailbox;
	ObjectPool<Task> pool;
	std::vector<Retired> limbo;
	std::uint64_t executed = 0;
	std::uint64_t spawned = 0;
	std::unique_ptr<trace::TraceBuffer> trace;
	trace::TraceFile trace_file;
	alignas(cache_line_size) std::atomic<std::uint64_t> announced{0};
};

inline thread_local Worker *current_worker = nullptr;

} // namespace detail

//! Owns the worker threads, the scheduler and the dependency engine for the
//! duration of one run.
class Runtime {
public:
	explicit Runtime(const RuntimeConfig &config)
		: _config(normalized(config)),
		_engine(deps::EngineOptions{_config.auditing, _config.cas_loop},
			deps::EngineHooks{[this](Task &task) { on_ready(task); },
				[this](Task &task) { on_dispose(task); }})
	{
		sched::SchedulerOptions options;
		options.max_threads = _config.workers + 1;
		options.queues = _config.effective_queues();
		options.capacity = _config.capacity;
		options.policy = _config.policy;
		options.redrain = _config.redrain;
		_scheduler = sched::make_scheduler<Task *>(_config.sync, options);
		for (std::size_t i = 0; i < _config.workers; ++i)
			_workers.push_back(std::make_unique<detail::Worker>(*this, i));
	}

	Runtime(const Runtime &) = delete;
	Runtime &operator=(const Runtime &) = delete;

	//! Executes `root` as the initial task and returns once it and every
	//! descendant have been disposed. Throws std::logic_error when another
	//! run is in progress.
	RunReport run(std::function<void()> root)
	{
		Runtime *expected = nullptr;
		if (!active_slot().compare_exchange_strong(expected, this))
			throw std::logic_error("taskforge: nested or concurrent run is not supported");
		struct Deactivate {
			~Deactivate() { active_slot().store(nullptr); }
		} deactivate;

		const std::int64_t domains_before = deps::DependencyDomain::live();
		if (_config.trace_enabled)
			open_traces();

		_root_done.store(false);
		_shutdown.store(false);
		Task *root_task = _workers[0]->pool.create();
		root_task->body = std::move(root);
		root_task->id = 0;
		_root = root_task;

		const auto start = std::chrono::steady_clock::now();
		std::vector<std::thread> threads;
		threads.reserve(_workers.size());
		for (auto &worker : _workers)
			threads.emplace_back([this, w = worker.get()] { worker_main(*w); });

		root_task->state.store(TaskState::ready, std::memory_order_relaxed);
		_scheduler->add_ready_task(root_task, _config.workers);

		_root_done.wait(false, std::memory_order_acquire);
		const auto end = std::chrono::steady_clock::now();
		_shutdown.store(true, std::memory_order_release);
		for (auto &thread : threads)
			thread.join();

		RunReport report;
		report.wall_ns = static_cast<std::uint64_t>(
			std::chrono::duration_cast<std::chrono::nanoseconds>(end - start).count());
		std::uint64_t created = 0;
		std::uint64_t destroyed = 0;
		for (auto &worker : _workers) {
			for (const auto &retired : worker->limbo)
				free_task(*worker, retired.task);
			worker->limbo.clear();
			created += worker->pool.created();
			destroyed += worker->pool.destroyed();
			report.tasks_executed += worker->executed;
			report.pending_messages += worker->mailbox.size();
			if (worker->trace) {
				report.trace.emitted += worker->trace->emitted();
				report.trace.persisted += worker->trace->persisted();
				report.trace.dropped += worker->trace->dropped();
				report.trace.failed_workers += worker->trace->failed() ? 1 : 0;
			}
		}
		report.live_tasks = static_cast<std::int64_t>(created - destroyed);
		report.live_domains = deps::DependencyDomain::live() - domains_before;
		report.nonterminal_accesses = _nonterminal.load(std::memory_order_relaxed);
		report.audit = _engine.audit();
		report.scheduler = _scheduler->stats();
		return report;
	}

	//! Creates a child of the running task. Must be called from a task body.
	void spawn(std::function<void()> body, std::span<const deps::AccessDecl> decls)
	{
		detail::Worker &worker = self();
		TASKFORGE_CHECK(worker.current != nullptr, "spawn called outside a task");
		Task &parent = *worker.current;
		TASKFORGE_DEBUG_ASSERT(parent.state.load(std::memory_order_relaxed) == TaskState::running,
			"spawn from a task that is not running");

		Task *task = worker.pool.create();
		task->body = std::move(body);
		task->id = ++worker.spawned * (_workers.size() + 1) + worker.id + 1;
		parent.child_count.fetch_add(1, std::memory_order_relaxed);
		emit(worker, trace::EventId::task_create, task->id);
		_engine.register_task_accesses(*task, decls, parent.child_domain(), worker.mailbox);
	}

	//! Returns once every child of the running task has completed. The worker
	//! executes other ready tasks meanwhile.
	void taskwait()
	{
		detail::Worker &worker = self();
		TASKFORGE_CHECK(worker.current != nullptr, "taskwait called outside a task");
		wait_for_children(worker, *worker.current);
	}

	const RuntimeConfig &config() const noexcept { return _config; }
	std::size_t worker_count() const noexcept { return _workers.size(); }

	static Runtime *active() noexcept { return active_slot().load(std::memory_order_acquire); }

	//! Id of the calling worker, or -1 outside worker threads.
	static long current_worker_id() noexcept
	{
		return detail::current_worker ? static_cast<long>(detail::current_worker->id) : -1;
	}

private:
	static constexpr std::size_t reclaim_batch = 64;

	static RuntimeConfig normalized(RuntimeConfig config)
	{
		if (config.workers == 0)
			config.workers = 1;
		return config;
	}

	static std::atomic<Runtime *> &active_slot() noexcept
	{
		static std::atomic<Runtime *> slot{nullptr};
		return slot;
	}

	detail::Worker &self()
	{
		detail::Worker *worker = detail::current_worker;
		TASKFORGE_CHECK(worker != nullptr && &worker->runtime == this,
			"runtime call from a thread that is not one of its workers");
		return *worker;
	}

	void open_traces()
	{
		std::error_code ec;
		std::filesystem::create_directories(_config.trace_dir, ec);
		for (auto &worker : _workers) {
			worker->trace = std::make_unique<trace::TraceBuffer>(_config.trace_subbuffers);
			const auto path = trace::TraceFile::path_for(_config.trace_dir, worker->id);
			if (!worker->trace_file.open(path)) {
				std::fprintf(stderr, "taskforge: cannot open trace file %s\n", path.c_str());
				worker->trace_file.close();
			}
		}
	}

	static void emit(detail::Worker &worker, trace::EventId event, std::uint64_t payload) noexcept
	{
		if (worker.trace)
			worker.trace->emit(event, payload);
	}

	void pin(detail::Worker &worker)
	{
		cpu_set_t allowed;
		CPU_ZERO(&allowed);
		bool ok = sched_getaffinity(0, sizeof(allowed), &allowed) == 0;
		int cpu = -1;
		if (ok) {
			std::size_t seen = 0;
			for (int c = 0; c < CPU_SETSIZE; ++c) {
				if (CPU_ISSET(c, &allowed) && seen++ == worker.id) {
					cpu = c;
					break;
				}
			}
		}
		if (cpu >= 0) {
			cpu_set_t target;
			CPU_ZERO(&target);
			CPU_SET(cpu, &target);
			ok = pthread_setaffinity_np(pthread_self(), sizeof(target), &target) == 0;
		} else {
			ok = false;
		}
		static std::atomic<bool> warned{false};
		if (!ok && !warned.exchange(true)) {
			std::fprintf(stderr,
				"taskforge: warning: could not pin worker %zu to its own CPU; running unpinned\n",
				worker.id);
		}
	}

	void worker_main(detail::Worker &worker)
	{
		detail::current_worker = &worker;
		if (_config.pin)
			pin(worker);

		IdleBackoff backoff;
		while (!_shutdown.load(std::memory_order_acquire)) {
			quiescent(worker);
			if (Task *task = fetch(worker)) {
				execute(worker, *task);
				backoff.reset();
			} else {
				backoff.pause();
			}
		}
		quiescent(worker);
		if (worker.trace && worker.trace_file.is_open())
			worker.trace->flush(worker.trace_file, true);
		worker.trace_file.close();
		detail::current_worker = nullptr;
	}

	Task *fetch(detail::Worker &worker)
	{
		const std::uint64_t entered = worker.trace ? trace::now_ns() : 0;
		std::optional<Task *> task = _scheduler->get_ready_task(worker.id);
		if (!task)
			return nullptr;
		if (worker.trace) {
			worker.trace->emit_at(entered, trace::EventId::sched_enter, worker.id);
			worker.trace->emit(trace::EventId::sched_leave, (*task)->id);
		}
		return *task;
	}

	void execute(detail::Worker &worker, Task &task)
	{
		TaskState expected = TaskState::ready;
		TASKFORGE_CHECK(task.state.compare_exchange_strong(
							expected, TaskState::running, std::memory_order_acq_rel),
			"task scheduled while not ready");
		Task *const previous = worker.current;
		worker.current = &task;
		emit(worker, trace::EventId::task_start, task.id);

		try {
			task.body();
		} catch (const std::exception &error) {
			std::fprintf(stderr, "taskforge: task %llu threw: %s\n",
				static_cast<unsigned long long>(task.id), error.what());
			std::abort();
		} catch (...) {
			std::fprintf(stderr, "taskforge: task %llu threw a non-standard exception\n",
				static_cast<unsigned long long>(task.id));
			std::abort();
		}
		task.body = nullptr;

		// A task completes only after its children.
		wait_for_children(worker, task);
		task.state.store(TaskState::completed, std::memory_order_release);
		emit(worker, trace::EventId::task_end, task.id);

		const std::size_t sent = _engine.unregister_task_accesses(task, worker.mailbox);
		emit(worker, trace::EventId::deps_deliver, sent);
		Task *const parent = task.parent;
		if (parent != nullptr)
			parent->child_count.fetch_sub(1, std::memory_order_acq_rel);
		worker.current = previous;
		++worker.executed;
		_engine.release(task);

		if (worker.trace && worker.trace->has_full_subbuffer() && worker.trace_file.is_open()) {
			const std::size_t written = worker.trace->flush(worker.trace_file, false);
			emit(worker, trace::EventId::buffer_flush, written);
		}
	}

	void wait_for_children(detail::Worker &worker, Task &task)
	{
		IdleBackoff backoff;
		while (task.child_count.load(std::memory_order_acquire) != 0) {
			quiescent(worker);
			if (Task *other = fetch(worker)) {
				execute(worker, *other);
				backoff.reset();
			} else {
				backoff.pause();
			}
		}
	}

	void on_ready(Task &task)
	{
		detail::Worker *worker = detail::current_worker;
		TASKFORGE_DEBUG_ASSERT(worker != nullptr, "task became ready outside a worker");
		emit(*worker, trace::EventId::task_ready, task.id);
		_scheduler->add_ready_task(&task, worker->id);
	}

	void on_dispose(Task &task)
	{
		if (&task == _root) {
			_root_done.store(true, std::memory_order_release);
			_root_done.notify_all();
		}
		detail::Worker *worker = detail::current_worker;
		TASKFORGE_CHECK(worker != nullptr, "task disposed outside a worker");
		// Other workers may still be reading the record; free it once every
		// worker has passed a quiescent point.
		worker->limbo.push_back({&task, _epoch.load(std::memory_order_seq_cst) + 1});
	}

	//! Called with no task records held besides the worker's own running
	//! tasks: announces the epoch and frees what nobody can still see.
	void quiescent(detail::Worker &worker)
	{
		if (!worker.limbo.empty()) {
			std::uint64_t global = _epoch.load(std::memory_order_seq_cst);
			const std::uint64_t wanted = worker.limbo.back().epoch;
			while (global < wanted
				&& !_epoch.compare_exchange_weak(global, wanted, std::memory_order_seq_cst)) {
			}
		}
		worker.announced.store(_epoch.load(std::memory_order_seq_cst), std::memory_order_release);
		if (worker.limbo.size() >= reclaim_batch
			|| (!worker.limbo.empty() && worker.current == nullptr))
			reclaim(worker);
	}

	void reclaim(detail::Worker &worker)
	{
		std::uint64_t safe = UINT64_MAX;
		for (const auto &other : _workers)
			safe = std::min(safe, other->announced.load(std::memory_order_acquire));
		std::size_t freed = 0;
		while (freed < worker.limbo.size() && worker.limbo[freed].epoch <= safe) {
			free_task(worker, worker.limbo[freed].task);
			++freed;
		}
		worker.limbo.erase(worker.limbo.begin(), worker.limbo.begin() + freed);
	}

	void free_task(detail::Worker &worker, Task *task)
	{
		for (const deps::DataAccess &access : task->accesses.span()) {
			if (!deps::DependencyEngine::is_terminal(access))
				_nonterminal.fetch_add(1, std::memory_order_relaxed);
		}
		worker.pool.destroy(task);
	}

	RuntimeConfig _config;
	deps::DependencyEngine _engine;
	std::unique_ptr<sched::Scheduler<Task *>> _scheduler;
	std::vector<std::unique_ptr<detail::Worker>> _workers;
	Task *_root = nullptr;
	std::atomic<bool> _root_done{false};
	std::atomic<bool> _shutdown{false};
	alignas(cache_line_size) std::atomic<std::uint64_t> _epoch{0};
	std::atomic<std::uint64_t> _nonterminal{0};
};

//! Runs `root` on a fresh runtime built from `config`.
inline RunReport run(const RuntimeConfig &config, std::function<void()> root)
{
	Runtime runtime(config);
	return runtime.run(std::move(root));
}

namespace detail {

inline Runtime &active_runtime()
{
	Runtime *runtime = Runtime::active();
	TASKFORGE_CHECK(runtime != nullptr, "no runtime is running");
	return *runtime;
}

} // namespace detail

inline void spawn(std::function<void()> body, std::span<const deps::AccessDecl> decls = {})
{
	detail::active_runtime().spawn(std::move(body), decls);
}

inline void spawn(std::function<void()> body, std::initializer_list<deps::AccessDecl> decls)
{
	detail::active_runtime().spawn(
		std::move(body), std::span<const deps::AccessDecl>(decls.begin(), decls.size()));
}

inline void taskwait() { detail::active_runtime().taskwait(); }

} // namespace taskforge
