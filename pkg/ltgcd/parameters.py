############################
# Default Configuration Options
############################
defaults = {
    ############################
    # Objective
    ############################
    # Contrastive temperature, instance and supervised terms
    'TAU': 0.1,
    # Prototype softmax temperature
    'TAU_P': 0.1,
    # Weights of the supervised term, prior alignment and uniform reweighting
    'LAMBDA': 1.0,
    'ALPHA': 0.0,
    'BETA': 0.0,
    # Class prior momentum, applied once per epoch; 0.9 ** 60 < 0.002, the
    # prior settles on the predicted histogram within the default run
    'MU': 0.9,

    ############################
    # Optimizer
    ############################
    'LR0': 0.02,
    'MOMENTUM': 0.9,
    'WEIGHT_DECAY': 1e-4,
    # Fractions of the total epochs at which the learning rate drops 10x
    'LR_MILESTONES': [0.5, 0.75],
    'EPOCHS': 60,
    'BATCH_SIZE': 256,
    'SEED': 0,

    ############################
    # Split
    ############################
    'NUM_CLASSES': 20,
    'NUM_KNOWN': 10,
    'SAMPLES_PER_KNOWN': 200,
    # rho = n_k / n_u
    'RHO': 5.0,
    'LABELED_FRACTION': 0.5,
    'DIM': 64,
    # Radius of the sphere the class means are drawn on
    'SEP': 5.0,

    ############################
    # Augmentation
    ############################
    'NOISE_SIGMA': 0.1,
    'DROP_PROB': 0.1,

    ############################
    # Model
    ############################
    'HIDDEN_DIM': 64,
    'PROJ_DIM': 32,
    'PROTO_EMA': 0.9,
    'KMEANS_MAX_ITER': 300,

    ############################
    # Sweep plan
    ############################
    'RHOS': [5.0],
    'ALPHAS': [0.0],
    'BETAS': [0.0, 1.0, 2.0, 5.0],
    'LAMBDAS': [1.0],
    'SEEDS': [0, 1, 2],
    'WORKERS': 1,
    'OUT': 'out',
}

# Named sweep plans following the hyper-parameter analysis; each entry only
# overrides plan axes, everything else comes from the defaults.
presets = {
    'beta': {'ALPHAS': [0.0], 'BETAS': [0.0, 1.0, 2.0, 5.0], 'RHOS': [5.0]},
    'alpha-beta2': {'ALPHAS': [0.0, 0.5, 1.0, 2.0], 'BETAS': [2.0],
                    'RHOS': [5.0]},
    'alpha-beta5': {'ALPHAS': [0.0, 0.5, 1.0, 2.0], 'BETAS': [5.0],
                    'RHOS': [5.0]},
    'rho': {'RHOS': [0.5, 1.0, 5.0, 10.0], 'ALPHAS': [0.0], 'BETAS': [2.0]},
}
