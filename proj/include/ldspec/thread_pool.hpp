#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ldspec {

/// Persistent worker pool for the MD force loop. Work is dispatched as
/// contiguous index ranges so that every worker always owns the same ions;
/// combined with per-ion fixed-order force summation this makes results
/// bit-identical for any worker count.
class ThreadPool {
public:
    /// workers == 0 selects std::thread::hardware_concurrency().
    explicit ThreadPool(unsigned workers = 0) {
        if (workers == 0) workers = std::thread::hardware_concurrency();
        if (workers == 0) workers = 1;
        count_ = workers;
        // worker 0 is the calling thread
        for (unsigned w = 1; w < count_; ++w)
            threads_.emplace_back([this, w] { worker_loop(w); });
    }

    ~ThreadPool() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            stop_ = true;
        }
        cv_.notify_all();
        for (auto& t : threads_) t.join();
    }

    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    unsigned worker_count() const { return count_; }

    /// Runs fn(begin, end) on count_ contiguous chunks of [0, n).
    void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
        if (count_ == 1 || n < 2) {
            if (n > 0) fn(0, n);
            return;
        }
        {
            std::lock_guard<std::mutex> lock(mutex_);
            job_ = &fn;
            job_n_ = n;
            ++generation_;
            pending_ = count_ - 1;
        }
        cv_.notify_all();
        run_chunk(0, fn, n);
        std::unique_lock<std::mutex> lock(mutex_);
        done_cv_.wait(lock, [this] { return pending_ == 0; });
        job_ = nullptr;
    }

private:
    void run_chunk(unsigned w, const std::function<void(std::size_t, std::size_t)>& fn,
                   std::size_t n) const {
        const std::size_t chunk = (n + count_ - 1) / count_;
        const std::size_t begin = static_cast<std::size_t>(w) * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin < end) fn(begin, end);
    }

    void worker_loop(unsigned w) {
        std::uint64_t seen = 0;
        for (;;) {
            const std::function<void(std::size_t, std::size_t)>* job = nullptr;
            std::size_t n = 0;
            {
                std::unique_lock<std::mutex> lock(mutex_);
                cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
                if (stop_) return;
                seen = generation_;
                job = job_;
                n = job_n_;
            }
            if (job) run_chunk(w, *job, n);
            {
                std::lock_guard<std::mutex> lock(mutex_);
                if (--pending_ == 0) done_cv_.notify_one();
            }
        }
    }

    unsigned count_ = 1;
    std::vector<std::thread> threads_;
    std::mutex mutex_;
    std::condition_variable cv_;
    std::condition_variable done_cv_;
    const std::function<void(std::size_t, std::size_t)>* job_ = nullptr;
    std::size_t job_n_ = 0;
    std::uint64_t generation_ = 0;
    unsigned pending_ = 0;
    bool stop_ = false;
};

} // namespace ldspec
