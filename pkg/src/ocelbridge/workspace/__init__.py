from .columnar import read_columnar, store_columnar
from .workspace import (
    JobRecord,
    Workspace,
    append_job,
    find_done_job,
    init_workspace,
    load_ledger,
    new_job,
    open_workspace,
    read_upload,
    stage_upload,
    update_job,
    upload_path,
)

__all__ = [
    "read_columnar",
    "store_columnar",
    "JobRecord",
    "Workspace",
    "append_job",
    "find_done_job",
    "init_workspace",
    "load_ledger",
    "new_job",
    "open_workspace",
    "read_upload",
    "stage_upload",
    "update_job",
    "upload_path",
]
