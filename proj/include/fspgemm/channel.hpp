#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <mutex>
#include <optional>

namespace fspgemm {

// Bounded blocking FIFO connecting two pipeline stages.
//
// close() lets the consumer drain what is left; abort() wakes everybody and
// makes further pushes and pops fail immediately.
template <typename T>
class Channel {
public:
    explicit Channel(std::size_t depth) : depth_(depth == 0 ? 1 : depth) {}

    Channel(const Channel&) = delete;
    Channel& operator=(const Channel&) = delete;

    bool push(T value)
    {
        std::unique_lock lock(mutex_);
        not_full_.wait(lock, [&] { return aborted_ || items_.size() < depth_; });
        if (aborted_ || closed_) {
            return false;
        }
        items_.push_back(std::move(value));
        not_empty_.notify_one();
        return true;
    }

    std::optional<T> pop()
    {
        std::unique_lock lock(mutex_);
        not_empty_.wait(lock, [&] { return aborted_ || closed_ || !items_.empty(); });
        if (aborted_ || items_.empty()) {
            return std::nullopt;
        }
        T value = std::move(items_.front());
        items_.pop_front();
        not_full_.notify_one();
        return value;
    }

    void close()
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
        not_empty_.notify_all();
        not_full_.notify_all();
    }

    void abort()
    {
        std::lock_guard lock(mutex_);
        aborted_ = true;
        not_empty_.notify_all();
        not_full_.notify_all();
    }

    std::size_t depth() const { return depth_; }

private:
    const std::size_t depth_;
    std::mutex mutex_;
    std::condition_variable not_full_;
    std::condition_variable not_empty_;
    std::deque<T> items_;
    bool closed_ = false;
    bool aborted_ = false;
};

}  // namespace fspgemm
