# Per-user balanced datasets
from .builder import (
    DatasetError,
    LabeledSample,
    MasterDatasets,
    UserDataset,
    UserSplit,
    assemble_master,
    build_user_dataset,
    imposter_quotas,
    split_user,
)

__all__ = [
    'DatasetError', 'LabeledSample', 'MasterDatasets', 'UserDataset', 'UserSplit',
    'assemble_master', 'build_user_dataset', 'imposter_quotas', 'split_user',
]
