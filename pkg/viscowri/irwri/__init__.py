from .batches import FrequencyBatch, batch_table, build_batches, frequency_plan
from .service import IrwriService, batch_data, model_data
from .state import IrwriState, StopStatus, StoppingCriteria, Survey, VirtualSourceSystem
from .steps import (REGULARIZERS, RegularizedModelStep, assemble_systems, assemble_virtual_sources, check_stop,
                    dual_update, least_squares_model, model_step, source_vectors, wavefield_gamma, wavefield_step)
