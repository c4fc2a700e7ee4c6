#include <mpi.h>
#include <stdio.h>
int main(int argc, char *argv[])
{
    int rank, size, i, n = 0;
    double local = 1.0, result = 1.0;
    MPI_Init(&argc, &argv);
    MPI_Comm_rank(MPI_COMM_WORLD, &rank);
    MPI_Comm_size(MPI_COMM_WORLD, &size);
    if (rank == 0)
    {
        n = 20;
    }
    MPI_Bcast(&n, 1, MPI_INT, 0, MPI_COMM_WORLD);
    for (i = rank + 1; i <= n; i += size)
    {
        local *= i;
    }
    MPI_Reduce(&local, &result, 1, MPI_DOUBLE, MPI_PROD, 0, MPI_COMM_WORLD);
    if (rank == 0)
    {
        printf("%d! = %.0f\n", n, result);
    }
    MPI_Finalize();
    return 0;
}
