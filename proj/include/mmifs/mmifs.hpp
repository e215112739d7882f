#ifndef MMIFS_MMIFS_HPP
#define MMIFS_MMIFS_HPP

#include "mmifs/archive.hpp"
#include "mmifs/dataset.hpp"
#include "mmifs/error.hpp"
#include "mmifs/evaluator.hpp"
#include "mmifs/experiment.hpp"
#include "mmifs/metrics.hpp"
#include "mmifs/objectives.hpp"
#include "mmifs/optimizer.hpp"
#include "mmifs/probability_model.hpp"
#include "mmifs/rng.hpp"
#include "mmifs/subset.hpp"
#include "mmifs/synth.hpp"

#endif
