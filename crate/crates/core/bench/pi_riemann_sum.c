#include <mpi.h>
#include <stdio.h>
int main(int argc, char *argv[])
{
    int rank, size, i, n = 0;
    double h, x, local = 0.0, pi = 0.0;
    MPI_Init(&argc, &argv);
    MPI_Comm_rank(MPI_COMM_WORLD, &rank);
    MPI_Comm_size(MPI_COMM_WORLD, &size);
    if (rank == 0)
    {
        n = 1000000;
    }
    MPI_Bcast(&n, 1, MPI_INT, 0, MPI_COMM_WORLD);
    h = 1.0 / n;
    for (i = rank; i < n; i += size)
    {
        x = h * (i + 0.5);
        local += 4.0 / (1.0 + x * x);
    }
    local *= h;
    MPI_Reduce(&local, &pi, 1, MPI_DOUBLE, MPI_SUM, 0, MPI_COMM_WORLD);
    if (rank == 0)
    {
        printf("pi = %.12f\n", pi);
    }
    MPI_Finalize();
    return 0;
}
