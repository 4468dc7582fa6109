#pragma once

#include "imutube/calib3d/calibrate.hpp"
#include "imutube/calib3d/pose_io.hpp"
#include "imutube/distmap/frechet.hpp"
#include "imutube/distmap/rank_map.hpp"
#include "imutube/egomotion/compose.hpp"
#include "imutube/egomotion/depth_io.hpp"
#include "imutube/harlab/loso.hpp"
#include "imutube/imusynth/imu_io.hpp"
#include "imutube/imusynth/noise.hpp"
#include "imutube/pipeline/dataset.hpp"
#include "imutube/pipeline/report.hpp"
#include "imutube/pipeline/run.hpp"
#include "imutube/pipeline/synthetic.hpp"
#include "imutube/trackio/filter.hpp"
#include "imutube/trackio/kalman.hpp"
#include "imutube/trackio/keypoint_io.hpp"
#include "imutube/trackio/sort_tracker.hpp"
