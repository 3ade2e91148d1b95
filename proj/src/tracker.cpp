#include "ct/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ct {

namespace {

constexpr double kGatedOut = 1e9;

double cosine_distance(const std::vector<float>& a, const std::vector<float>& b) {
    if (a.empty() || b.empty() || a.size() != b.size()) return kGatedOut;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na <= 0.0 || nb <= 0.0) return kGatedOut;
    return std::max(0.0, 1.0 - dot / std::sqrt(na * nb));
}

}  // namespace

Tracker::Tracker(TrackerParams params, double image_width, double image_height)
    : params_(std::move(params)), image_width_(image_width), image_height_(image_height) {}

std::vector<TrackOutput> Tracker::step(const FrameDetections& fd, const GrayImage* frame) {
    if (fd.frame_index != frame_ + 1) {
        throw std::invalid_argument("tracker step: expected frame " + std::to_string(frame_ + 1) +
                                    ", got " + std::to_string(fd.frame_index));
    }
    if (!fd.embeddings.empty() && fd.embeddings.size() != fd.detections.size()) {
        throw std::invalid_argument("tracker step: one embedding per detection required");
    }
    frame_ = fd.frame_index;
    const bool use_embeddings = !fd.embeddings.empty();

    // 1. motion prediction for every live track
    for (Track& t : live_) {
        t.kalman = params_.motion.predict(t.kalman);
        t.frames_since_update += 1;
    }

    const int n_tracks = static_cast<int>(live_.size());
    const int n_dets = static_cast<int>(fd.detections.size());
    std::vector<char> track_matched(n_tracks, 0);
    std::vector<char> det_matched(n_dets, 0);
    std::vector<std::pair<int, int>> matches;  // (track index, det index)

    // 2. stage A: appearance cost when embeddings are supplied, IoU otherwise
    {
        CostMatrix cost(n_tracks, n_dets);
        for (int i = 0; i < n_tracks; ++i) {
            for (int j = 0; j < n_dets; ++j) {
                if (use_embeddings) {
                    cost.at(i, j) = cosine_distance(live_[i].embedding, fd.embeddings[j]);
                } else {
                    cost.at(i, j) = 1.0 - iou(live_[i].box(), fd.detections[j].box);
                }
            }
        }
        const double gate = use_embeddings ? params_.embedding_gate : params_.stage_a_gate;
        for (const auto& [i, j] : solve_assignment(cost, gate).matches) {
            matches.emplace_back(i, j);
            track_matched[i] = 1;
            det_matched[j] = 1;
        }
    }

    // 3. stage B: looser IoU gate on the residuals
    {
        std::vector<int> rest_tracks, rest_dets;
        for (int i = 0; i < n_tracks; ++i) {
            if (!track_matched[i]) rest_tracks.push_back(i);
        }
        for (int j = 0; j < n_dets; ++j) {
            if (!det_matched[j]) rest_dets.push_back(j);
        }
        CostMatrix cost(static_cast<int>(rest_tracks.size()), static_cast<int>(rest_dets.size()));
        for (size_t a = 0; a < rest_tracks.size(); ++a) {
            for (size_t b = 0; b < rest_dets.size(); ++b) {
                cost.at(static_cast<int>(a), static_cast<int>(b)) =
                    1.0 - iou(live_[rest_tracks[a]].box(), fd.detections[rest_dets[b]].box);
            }
        }
        for (const auto& [a, b] : solve_assignment(cost, params_.stage_b_gate).matches) {
            const int i = rest_tracks[a];
            const int j = rest_dets[b];
            matches.emplace_back(i, j);
            track_matched[i] = 1;
            det_matched[j] = 1;
        }
    }

    // 4. measurement updates for matched tracks
    for (const auto& [i, j] : matches) {
        Track& t = live_[i];
        const Detection& d = fd.detections[j];
        t.kalman = params_.motion.update(t.kalman, to_xyah(d.box));
        t.hit_count += 1;
        t.lost_count = 0;
        t.frames_since_update = 0;
        t.confidence = d.conf;
        t.last_box = t.box();
        if (frame != nullptr) t.last_patch = crop(*frame, t.last_box);
        if (use_embeddings) t.embedding = fd.embeddings[j];
        if (t.state == TrackState::New) {
            if (t.hit_count > params_.probation_frames) t.state = TrackState::Tracked;
        } else {
            t.state = TrackState::Tracked;
        }
    }

    // 5a. unmatched tracks turn (or stay) lost; unconfirmed ones are dropped
    for (int i = 0; i < n_tracks; ++i) {
        if (track_matched[i]) continue;
        Track& t = live_[i];
        if (t.state == TrackState::New) {
            t.state = TrackState::Removed;
            continue;
        }
        t.lost_count += 1;
        t.state = TrackState::Lost;
    }
    std::erase_if(live_, [](const Track& t) { return t.state == TrackState::Removed; });

    // 5b. fresh tracks from confident unmatched detections
    for (int j = 0; j < n_dets; ++j) {
        if (det_matched[j]) continue;
        const Detection& d = fd.detections[j];
        if (d.conf < params_.det_conf_threshold) continue;
        Track t;
        t.id = next_id_++;
        t.kalman = params_.motion.initiate(to_xyah(d.box));
        t.hit_count = 1;
        t.confidence = d.conf;
        t.last_box = t.box();
        if (frame != nullptr) t.last_patch = crop(*frame, t.last_box);
        if (use_embeddings) t.embedding = fd.embeddings[j];
        t.state = params_.probation_frames == 0 ? TrackState::Tracked : TrackState::New;
        live_.push_back(std::move(t));
    }

    for (const Track& t : live_) {
        if (t.state == TrackState::Lost) stats_.lost_events += 1;
    }

    // 5c. compensation over the lost set
    if (params_.ct_enabled) {
        std::vector<BBox> tracked_boxes;
        std::vector<Track*> lost_ptrs;
        for (Track& t : live_) {
            if (t.state == TrackState::Tracked || t.state == TrackState::New) {
                tracked_boxes.push_back(t.box());
            } else if (t.state == TrackState::Lost &&
                       t.frames_since_update <= params_.max_lost_age) {
                lost_ptrs.push_back(&t);
            }
        }
        CompensationInput input;
        input.lost = lost_ptrs;
        input.tracked_boxes = tracked_boxes;
        input.frame = frame;
        input.image_width = image_width_;
        input.image_height = image_height_;
        input.predict_states = false;  // states were advanced in step 1
        const std::vector<Track*> accepted =
            compensate(input, params_.ct, params_.appearance, params_.motion);
        for (Track* t : accepted) {
            t->state = TrackState::Tracked;
            t->frames_since_update = 0;
        }
        stats_.compensated += static_cast<long>(accepted.size());
    }

    // 6. retire stale lost tracks
    manage_lifecycle(live_, params_.max_lost_age);

    std::vector<TrackOutput> outputs;
    for (const Track& t : live_) {
        if (t.state == TrackState::Tracked) {
            outputs.push_back({t.id, t.box(), t.confidence});
        }
    }
    return outputs;
}

std::vector<Track> Tracker::tracked() const {
    std::vector<Track> out;
    for (const Track& t : live_) {
        if (t.state == TrackState::Tracked) out.push_back(t);
    }
    return out;
}

std::vector<Track> Tracker::lost() const {
    std::vector<Track> out;
    for (const Track& t : live_) {
        if (t.state == TrackState::Lost) out.push_back(t);
    }
    return out;
}

int manage_lifecycle(std::vector<Track>& tracks, int max_lost_age) {
    const auto before = tracks.size();
    std::erase_if(tracks, [max_lost_age](const Track& t) {
        return t.state == TrackState::Lost && t.frames_since_update > max_lost_age;
    });
    return static_cast<int>(before - tracks.size());
}

}  // namespace ct
