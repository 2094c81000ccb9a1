#pragma once

// Umbrella header for the full pipeline.

#include "wunet/adam.hpp"
#include "wunet/boxes.hpp"
#include "wunet/checkpoint.hpp"
#include "wunet/dataset.hpp"
#include "wunet/detector.hpp"
#include "wunet/error.hpp"
#include "wunet/eval.hpp"
#include "wunet/image.hpp"
#include "wunet/kitti.hpp"
#include "wunet/manifest.hpp"
#include "wunet/metrics.hpp"
#include "wunet/model.hpp"
#include "wunet/ops.hpp"
#include "wunet/parallel.hpp"
#include "wunet/rng.hpp"
#include "wunet/scene.hpp"
#include "wunet/tensor.hpp"
#include "wunet/train.hpp"
#include "wunet/weather.hpp"
