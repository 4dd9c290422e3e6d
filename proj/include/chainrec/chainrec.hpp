#pragma once

#include "chainrec/certificates.hpp"
#include "chainrec/chain.hpp"
#include "chainrec/classical.hpp"
#include "chainrec/constructions.hpp"
#include "chainrec/error.hpp"
#include "chainrec/influence.hpp"
#include "chainrec/linear_op.hpp"
#include "chainrec/norm.hpp"
#include "chainrec/operators.hpp"
#include "chainrec/scalar.hpp"
#include "chainrec/seq_vector.hpp"
#include "chainrec/tree.hpp"
#include "chainrec/vertex.hpp"
#include "chainrec/verdict.hpp"
#include "chainrec/weights.hpp"
