from eigendesign.artifacts.writers import (
    atomic_path,
    heatmap_pixels,
    write_density_csv,
    write_density_vtk,
    write_eigenfunction_vtk,
    write_heatmap,
    write_history_csv,
    write_mesh_vtk,
    write_text,
)
